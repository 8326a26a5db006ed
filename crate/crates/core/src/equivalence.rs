//! Decision procedures for unitary equivalence of kernel modules.
//!
//! In rank one, two modules on a starlike domain are equivalent exactly when
//! `log μ` is pluriharmonic, i.e. when `∂∂̄ log μ² ≡ 0`. Finite differences
//! cannot certify exact vanishing, so residuals between `tol` and `10·tol`
//! yield an inconclusive verdict.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{log_hessian, FdScheme};
use crate::error::{Error, Result};
use crate::holomorphic::{ComplexPoint, HoloMatrix};
use crate::kernels::KernelSpec;
use crate::linalg::{frobenius, CMatrix};
use crate::localization::{grammian, localized_modulus};

/// Residuals above `GRAY_BAND_FACTOR · tol` prove inequivalence.
pub const GRAY_BAND_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Equivalent,
    Inequivalent,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Equivalent => "equivalent",
            Verdict::Inequivalent => "inequivalent",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Outcome of a grid test. A witness is reported whenever the verdict is not
/// `equivalent`: the grid point of smallest norm whose residual exceeds the
/// threshold that decided the verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceVerdict {
    pub verdict: Verdict,
    pub max_residual: f64,
    pub witness_point: Option<ComplexPoint>,
    pub witness_residual: Option<f64>,
    pub grid_size: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub pass: bool,
    pub max_residual: f64,
    pub worst_point: ComplexPoint,
    pub grid_size: usize,
    pub tolerance: f64,
}

fn check_pair(a: &KernelSpec, b: &KernelSpec) -> Result<()> {
    if a.rank() != b.rank() {
        return Err(Error::RankMismatch {
            context: "equivalence",
            detail: format!("ranks {} and {}", a.rank(), b.rank()),
        });
    }
    if a.domain() != b.domain() {
        return Err(Error::DomainMismatch { context: "equivalence" });
    }
    Ok(())
}

fn check_grid(grid: &[ComplexPoint], tol: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("equivalence", "grid is empty"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("equivalence", "tolerance must be positive"));
    }
    Ok(())
}

fn witness(grid: &[ComplexPoint], residuals: &[f64], threshold: f64) -> Option<(ComplexPoint, f64)> {
    grid.iter()
        .zip(residuals)
        .filter(|(_, &r)| r > threshold)
        .min_by(|(p, _), (q, _)| p.norm_2().total_cmp(&q.norm_2()))
        .map(|(p, &r)| (p.clone(), r))
}

fn max_of(residuals: &[f64]) -> f64 {
    residuals.iter().copied().fold(0.0, f64::max)
}

/// Classifies residuals against `tol` with the gray band `[tol, 10·tol]`.
pub fn classify(grid: &[ComplexPoint], residuals: &[f64], tol: f64) -> EquivalenceVerdict {
    let max_residual = max_of(residuals);
    let (verdict, threshold) = if max_residual <= tol {
        (Verdict::Equivalent, None)
    } else if max_residual > GRAY_BAND_FACTOR * tol {
        (Verdict::Inequivalent, Some(GRAY_BAND_FACTOR * tol))
    } else {
        (Verdict::Inconclusive, Some(tol))
    };
    let w = threshold.and_then(|t| witness(grid, residuals, t));
    EquivalenceVerdict {
        verdict,
        max_residual,
        witness_residual: w.as_ref().map(|(_, r)| *r),
        witness_point: w.map(|(p, _)| p),
        grid_size: grid.len(),
        tolerance: tol,
    }
}

/// `‖[∂²/∂z_i∂z̄_j log μ²]‖_F` at `z` for a rank-one pair.
pub fn log_modulus_residual(a: &KernelSpec, b: &KernelSpec, z: &ComplexPoint, scheme: &FdScheme) -> Result<f64> {
    let mu2 = |p: &ComplexPoint| Ok(localized_modulus(a, b, p)?.scalar_modulus().powi(2));
    Ok(frobenius(&log_hessian(mu2, z, scheme, a.domain())?))
}

pub fn decide_rank_one(a: &KernelSpec, b: &KernelSpec, grid: &[ComplexPoint], tol: f64) -> Result<EquivalenceVerdict> {
    decide_rank_one_with_scheme(a, b, grid, tol, &FdScheme::default())
}

pub fn decide_rank_one_with_scheme(
    a: &KernelSpec,
    b: &KernelSpec,
    grid: &[ComplexPoint],
    tol: f64,
    scheme: &FdScheme,
) -> Result<EquivalenceVerdict> {
    check_pair(a, b)?;
    if a.rank() != 1 {
        return Err(Error::RankMismatch {
            context: "equivalence",
            detail: format!(
                "the curvature test is automated for rank one only, got rank {}",
                a.rank()
            ),
        });
    }
    check_grid(grid, tol)?;
    let residuals = grid
        .par_iter()
        .map(|z| log_modulus_residual(a, b, z, scheme))
        .collect::<Result<Vec<f64>>>()?;
    Ok(classify(grid, &residuals, tol))
}

/// Compares Grammians of the canonical generators. Unequal Grammians only
/// show that the canonical map is not isometric, so this test never returns
/// `inequivalent`.
pub fn grammian_equality(
    a: &KernelSpec,
    b: &KernelSpec,
    grid: &[ComplexPoint],
    tol: f64,
) -> Result<EquivalenceVerdict> {
    check_pair(a, b)?;
    check_grid(grid, tol)?;
    let residuals = grid
        .par_iter()
        .map(|z| Ok(frobenius(&(grammian(a, z)? - grammian(b, z)?))))
        .collect::<Result<Vec<f64>>>()?;
    let mut v = classify(grid, &residuals, tol);
    if v.verdict == Verdict::Inequivalent {
        let w = witness(grid, &residuals, tol);
        v.verdict = Verdict::Inconclusive;
        v.witness_residual = w.as_ref().map(|(_, r)| *r);
        v.witness_point = w.map(|(p, _)| p);
    }
    Ok(v)
}

/// Checks `‖Ψ(z)*Ψ(z) − μ(z)²‖_F ≤ tol` on the grid, with `μ` the modulus of
/// `(a, b)` in orthonormal frames. Reports the worst point.
pub fn verify_factorization(
    a: &KernelSpec,
    b: &KernelSpec,
    psi: &HoloMatrix,
    grid: &[ComplexPoint],
    tol: f64,
) -> Result<FactorizationReport> {
    check_pair(a, b)?;
    check_grid(grid, tol)?;
    if psi.rows() != a.rank() || psi.cols() != a.rank() {
        return Err(Error::RankMismatch {
            context: "equivalence",
            detail: format!("Ψ is {}x{}, kernels have rank {}", psi.rows(), psi.cols(), a.rank()),
        });
    }
    if psi.dim() != a.domain().dim() {
        return Err(Error::DimensionMismatch {
            expected: a.domain().dim(),
            got: psi.dim(),
        });
    }
    let residuals = grid
        .par_iter()
        .map(|z| {
            let mu = localized_modulus(a, b, z)?.modulus;
            let p = psi.eval(z)?;
            let lhs: CMatrix = p.adjoint() * p;
            Ok(frobenius(&(lhs - &mu * &mu)))
        })
        .collect::<Result<Vec<f64>>>()?;
    let (worst, max_residual) =
        residuals.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |(bi, bv), (i, &r)| if r > bv { (i, r) } else { (bi, bv) },
        );
    Ok(FactorizationReport {
        pass: max_residual <= tol,
        max_residual,
        worst_point: grid[worst].clone(),
        grid_size: grid.len(),
        tolerance: tol,
    })
}
