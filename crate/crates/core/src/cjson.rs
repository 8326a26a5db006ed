//! JSON shapes for complex scalars and matrices: `{"re": .., "im": ..}` and
//! row-major nested arrays of those.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Cx {
    fn from(c: Complex64) -> Self {
        Cx { re: c.re, im: c.im }
    }
}

impl From<Cx> for Complex64 {
    fn from(c: Cx) -> Self {
        Complex64::new(c.re, c.im)
    }
}

pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<Cx>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| Cx::from(m[(i, j)])).collect())
        .collect()
}

pub fn rows_to_matrix(rows: &[Vec<Cx>]) -> Result<CMatrix, String> {
    let nrows = rows.len();
    if nrows == 0 {
        return Err("matrix has no rows".into());
    }
    let ncols = rows[0].len();
    if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err("matrix rows are empty or ragged".into());
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| rows[i][j].into()))
}

/// `#[serde(with = "crate::cjson::matrix")]` adapter.
pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        matrix_to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let rows = Vec::<Vec<Cx>>::deserialize(d)?;
        rows_to_matrix(&rows).map_err(serde::de::Error::custom)
    }
}
