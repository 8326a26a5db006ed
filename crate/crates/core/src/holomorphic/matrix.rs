use num_complex::Complex64;

use super::expr::ensure_nonvanishing;
use super::{ComplexPoint, HoloExpr};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// A rows×cols grid of holomorphic expressions over a common number of
/// variables; entries are stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HoloMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<HoloExpr>,
}

impl HoloMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<HoloExpr>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::invalid(
                "holomorphic",
                format!(
                    "{}x{} matrix needs {} entries, got {}",
                    rows,
                    cols,
                    rows * cols,
                    entries.len()
                ),
            ));
        }
        let dim = entries[0].dim();
        if let Some(bad) = entries.iter().find(|e| e.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        Ok(HoloMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<HoloExpr>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::invalid("holomorphic", "matrix rows have different lengths"));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn identity(dim: usize, m: usize) -> Self {
        Self::diagonal((0..m).map(|_| HoloExpr::one(dim)).collect()).expect("nonempty diagonal")
    }

    pub fn diagonal(diag: Vec<HoloExpr>) -> Result<Self> {
        let m = diag.len();
        if m == 0 {
            return Err(Error::invalid("holomorphic", "empty diagonal"));
        }
        let dim = diag[0].dim();
        let mut entries = vec![HoloExpr::zero(dim); m * m];
        for (k, d) in diag.into_iter().enumerate() {
            entries[k * m + k] = d;
        }
        Self::new(m, m, entries)
    }

    /// 1×1 matrix holding a scalar multiplier.
    pub fn scalar(e: HoloExpr) -> Self {
        HoloMatrix {
            rows: 1,
            cols: 1,
            entries: vec![e],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.entries[0].dim()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &HoloExpr {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[HoloExpr] {
        &self.entries
    }

    pub fn eval(&self, z: &ComplexPoint) -> Result<CMatrix> {
        let vals = self
            .entries
            .iter()
            .map(|e| e.eval(z))
            .collect::<Result<Vec<Complex64>>>()?;
        Ok(CMatrix::from_row_slice(self.rows, self.cols, &vals))
    }

    /// Symbolic matrix product.
    pub fn product(&self, rhs: &HoloMatrix) -> Result<HoloMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::invalid(
                "holomorphic",
                format!(
                    "cannot multiply {}x{} by {}x{}",
                    self.rows, self.cols, rhs.rows, rhs.cols
                ),
            ));
        }
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: rhs.dim(),
            });
        }
        let mut entries = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let e = (0..self.cols)
                    .map(|k| self.entry(i, k).clone() * rhs.entry(k, j).clone())
                    .reduce(|a, b| a + b)
                    .expect("inner dimension is positive");
                entries.push(e);
            }
        }
        HoloMatrix::new(self.rows, rhs.cols, entries)
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::invalid(
                "holomorphic",
                format!("{}x{} matrix is not square", self.rows, self.cols),
            ))
        }
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> HoloMatrix {
        let n = self.rows;
        let entries = (0..n)
            .filter(|&i| i != skip_row)
            .flat_map(|i| (0..n).filter(move |&j| j != skip_col).map(move |j| (i, j)))
            .map(|(i, j)| self.entry(i, j).clone())
            .collect();
        HoloMatrix {
            rows: n - 1,
            cols: n - 1,
            entries,
        }
    }

    /// Symbolic determinant by cofactor expansion along the first row.
    pub fn determinant(&self) -> Result<HoloExpr> {
        self.require_square()?;
        Ok(self.det_unchecked())
    }

    fn det_unchecked(&self) -> HoloExpr {
        if self.rows == 1 {
            return self.entries[0].clone();
        }
        (0..self.cols)
            .map(|j| {
                let term = self.entry(0, j).clone() * self.minor(0, j).det_unchecked();
                if j % 2 == 0 {
                    term
                } else {
                    -term
                }
            })
            .reduce(|a, b| a + b)
            .expect("nonempty row")
    }

    /// Inverse by Cramer's rule: adjugate over determinant.
    pub fn inverse(&self) -> Result<HoloMatrix> {
        self.require_square()?;
        let n = self.rows;
        let det = self.det_unchecked();
        if n == 1 {
            return Ok(HoloMatrix::scalar(det.recip()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                // adj(A)_ij = (-1)^{i+j} det(minor(j, i))
                let cof = self.minor(j, i).det_unchecked();
                let cof = if (i + j) % 2 == 0 { cof } else { -cof };
                entries.push(cof / det.clone());
            }
        }
        HoloMatrix::new(n, n, entries)
    }

    pub fn dilate(&self, t: Complex64) -> HoloMatrix {
        HoloMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.dilate(t)).collect(),
        }
    }

    /// Validates a multiplier over `domain`: all denominators and, for square
    /// matrices, the determinant stay away from zero on the closed domain.
    pub fn check_invertible_on(&self, domain: &Domain) -> Result<()> {
        self.require_square()?;
        if self.dim() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: self.dim(),
            });
        }
        for e in &self.entries {
            e.check_denominators(domain)?;
        }
        let net = domain.closed_net();
        // Denominators are already nonvanishing, so zeros of the determinant
        // are zeros of its numerator polynomial.
        let (num, _) = self.det_unchecked().to_rational();
        ensure_nonvanishing(&num.to_expr(), &net, domain.net_covering_radius(), "determinant")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z() -> HoloExpr {
        HoloExpr::var(1, 0)
    }

    #[test]
    fn eval_examples() {
        let id = HoloMatrix::identity(1, 2);
        assert_eq!(id.eval(&0.3.into()).unwrap(), CMatrix::identity(2, 2));

        let d = HoloMatrix::diagonal(vec![z(), HoloExpr::one(1)]).unwrap();
        let v = d.eval(&0.0.into()).unwrap();
        assert_eq!(
            v,
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]))
        );

        let u = HoloMatrix::from_rows(vec![
            vec![HoloExpr::one(1), z()],
            vec![HoloExpr::zero(1), HoloExpr::one(1)],
        ])
        .unwrap();
        let v = u.eval(&0.5.into()).unwrap();
        assert_eq!(v[(0, 1)], c(0.5, 0.0));
        assert_eq!(v[(1, 0)], c(0.0, 0.0));
    }

    #[test]
    fn inverse_by_cramer() {
        let m = HoloMatrix::from_rows(vec![
            vec![2.0 + z(), z()],
            vec![HoloExpr::real(1, 0.5), 3.0 + z().pow(2)],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        let p = ComplexPoint::from_re_im(0.2, 0.3);
        let prod = m.eval(&p).unwrap() * inv.eval(&p).unwrap();
        assert!((prod - CMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn ragged_and_mixed_dims_rejected() {
        assert!(HoloMatrix::from_rows(vec![vec![z()], vec![z(), z()]]).is_err());
        assert!(HoloMatrix::new(1, 2, vec![z(), HoloExpr::var(2, 1)]).is_err());
    }

    #[test]
    fn invertibility_check() {
        let ok = HoloMatrix::scalar(1.0 + 0.5 * z());
        assert!(ok.check_invertible_on(&Domain::unit_disk()).is_ok());
        let singular = HoloMatrix::diagonal(vec![z(), HoloExpr::one(1)]).unwrap();
        assert!(singular.check_invertible_on(&Domain::unit_disk()).is_err());
    }
}
