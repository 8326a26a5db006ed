//! `{"poly": [...]}` / `{"ratio": {"num": .., "den": ..}}` encoding of
//! expressions; matrices are row-major nested arrays of expressions.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::expr::Polynomial;
use super::{HoloExpr, HoloMatrix};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TermJson {
    re: f64,
    im: f64,
    powers: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum PolyJson {
    Terms(Vec<TermJson>),
    Wrapped { poly: Vec<TermJson> },
}

impl PolyJson {
    fn terms(&self) -> &[TermJson] {
        match self {
            PolyJson::Terms(t) | PolyJson::Wrapped { poly: t } => t,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum ExprJson {
    Poly(Vec<TermJson>),
    Ratio { num: PolyJson, den: PolyJson },
}

fn poly_from_terms(terms: &[TermJson]) -> Result<Polynomial, String> {
    let first = terms.first().ok_or("polynomial needs at least one term")?;
    let dim = first.powers.len();
    if dim == 0 {
        return Err("term exponent vector is empty".into());
    }
    if terms.iter().any(|t| t.powers.len() != dim) {
        return Err("terms disagree on the number of variables".into());
    }
    if terms.iter().any(|t| !t.re.is_finite() || !t.im.is_finite()) {
        return Err("non-finite coefficient".into());
    }
    Ok(Polynomial::from_terms(
        dim,
        terms.iter().map(|t| (t.powers.clone(), Complex64::new(t.re, t.im))),
    ))
}

fn poly_to_terms(p: &Polynomial) -> Vec<TermJson> {
    let mut out: Vec<TermJson> = p
        .terms()
        .map(|(e, c)| TermJson {
            re: c.re,
            im: c.im,
            powers: e.clone(),
        })
        .collect();
    if out.is_empty() {
        out.push(TermJson {
            re: 0.0,
            im: 0.0,
            powers: vec![0; p.dim()],
        });
    }
    out
}

impl TryFrom<ExprJson> for HoloExpr {
    type Error = String;

    fn try_from(j: ExprJson) -> Result<Self, String> {
        match j {
            ExprJson::Poly(terms) => Ok(poly_from_terms(&terms)?.to_expr()),
            ExprJson::Ratio { num, den } => {
                let n = poly_from_terms(num.terms())?;
                let d = poly_from_terms(den.terms())?;
                if n.dim() != d.dim() {
                    return Err("numerator and denominator disagree on the number of variables".into());
                }
                Ok(n.to_expr() / d.to_expr())
            }
        }
    }
}

impl From<&HoloExpr> for ExprJson {
    fn from(e: &HoloExpr) -> Self {
        let (num, den) = e.to_rational();
        if den.is_one() {
            ExprJson::Poly(poly_to_terms(&num))
        } else {
            ExprJson::Ratio {
                num: PolyJson::Terms(poly_to_terms(&num)),
                den: PolyJson::Terms(poly_to_terms(&den)),
            }
        }
    }
}

impl Serialize for HoloExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ExprJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for HoloExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ExprJson::deserialize(d)?;
        HoloExpr::try_from(j).map_err(serde::de::Error::custom)
    }
}

impl Serialize for HoloMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<&HoloExpr>> = (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.entry(i, j)).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HoloMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<HoloExpr>>::deserialize(d)?;
        HoloMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}
