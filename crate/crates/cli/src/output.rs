//! Deterministic CSV and JSON writers. Floats are always printed like C's
//! `%.12e`, and every file starts with the run metadata.

use serde::ser::{Serialize, SerializeMap, Serializer};
use serde_json::value::RawValue;

use qfhm::holomorphic::ComplexPoint;

/// `x` formatted as `%.12e`, e.g. `1.000000000000e+00`.
pub fn sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // -0 prints as 0 so that sign noise never changes the bytes of a report.
    let x = if x == 0.0 { 0.0 } else { x };
    let s = format!("{:.12e}", x);
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{}e{}{:02}", mantissa, sign, exp.abs())
}

/// A float that serializes to JSON as a `%.12e` literal (`null` if not finite).
#[derive(Debug, Clone, Copy)]
pub struct Sci(pub f64);

impl Serialize for Sci {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(sci(self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

/// A complex point as `[{"re": .., "im": ..}, ...]`.
pub struct SciPoint<'a>(pub &'a ComplexPoint);

impl Serialize for SciPoint<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let coords: Vec<SciComplex> = self.0.coords().iter().map(|c| SciComplex(c.re, c.im)).collect();
        coords.serialize(s)
    }
}

struct SciComplex(f64, f64);

impl Serialize for SciComplex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("re", &Sci(self.0))?;
        m.serialize_entry("im", &Sci(self.1))?;
        m.end()
    }
}

/// Ordered `key = value` pairs describing a run.
#[derive(Debug, Clone, Default)]
pub struct Metadata(pub Vec<(String, String)>);

impl Metadata {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_string(), value.to_string()));
    }
}

impl Serialize for Metadata {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

/// A table of numeric columns; integer columns are stored as floats and
/// printed without a fraction.
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Float(f64),
    Int(i64),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Float(x) => sci(*x),
            Cell::Int(n) => n.to_string(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Float(x) => Sci(*x).serialize(s),
            Cell::Int(n) => s.serialize_i64(*n),
        }
    }
}

pub fn csv(meta: &Metadata, table: &Table) -> String {
    let mut out = String::new();
    for (k, v) in &meta.0 {
        out.push_str(&format!("# {}={}\n", k, v));
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::text).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn table_json(meta: &Metadata, table: &Table) -> String {
    #[derive(serde::Serialize)]
    struct Doc<'a> {
        metadata: &'a Metadata,
        columns: &'a [String],
        rows: &'a [Vec<Cell>],
    }
    let doc = Doc {
        metadata: meta,
        columns: &table.columns,
        rows: &table.rows,
    };
    to_json(&doc)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}
