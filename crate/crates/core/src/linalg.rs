//! Small dense complex linear-algebra helpers shared by the localization,
//! oracle and map-analysis modules.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Condition-number ceiling used throughout: beyond it a Gram matrix or a
/// basis is treated as numerically degenerate.
pub const CONDITION_LIMIT: f64 = 1e12;

pub fn hermitize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// Eigenvalues of the Hermitian part of `a`, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(hermitize(a)).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// Applies `f` to the spectrum of the Hermitian part of `a`.
pub fn hermitian_map(a: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let eig = SymmetricEigen::new(hermitize(a));
    let v = &eig.eigenvectors;
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(f(l), 0.0)));
    hermitize(&(v * d * v.adjoint()))
}

/// Positive square root of a Hermitian positive-definite matrix.
pub fn sqrt_hpd(a: &CMatrix) -> CMatrix {
    hermitian_map(a, f64::sqrt)
}

pub fn inv_sqrt_hpd(a: &CMatrix) -> CMatrix {
    hermitian_map(a, |l| 1.0 / l.sqrt())
}

/// Inverse of a Hermitian positive-definite matrix, after checking that its
/// spectral condition number stays under [`CONDITION_LIMIT`].
pub fn inverse_hpd(a: &CMatrix, context: &'static str) -> Result<CMatrix> {
    let ev = hermitian_eigenvalues(a);
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition < CONDITION_LIMIT) {
        return Err(Error::IllConditioned {
            context,
            condition,
            limit: CONDITION_LIMIT,
        });
    }
    Ok(hermitian_map(a, |l| 1.0 / l))
}

pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = SVD::new(a.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Ratio of extreme singular values; infinite for singular matrices.
pub fn condition_number(a: &CMatrix) -> f64 {
    let sv = singular_values(a);
    let lo = sv[sv.len() - 1];
    if lo > 0.0 {
        sv[0] / lo
    } else {
        f64::INFINITY
    }
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn determinant(a: &CMatrix) -> Complex64 {
    a.clone().determinant()
}

pub fn identity(m: usize) -> CMatrix {
    CMatrix::identity(m, m)
}

pub fn block_diagonal(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = CMatrix::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}
