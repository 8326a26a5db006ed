//! Curvature (1,1)-forms of the line bundle (or determinant bundle) attached
//! to a kernel, computed by finite differences.
//!
//! With `γ(z) = f ⊗ 1_z` and `‖γ(z)‖² = G(z)` the curvature is
//! `c_ij = −½ ∂²/∂z_i∂z̄_j log ‖γ(z)‖ = −¼ ∂∂̄ log G`. For rank `m > 1` only the
//! determinant form `−¼ ∂∂̄ log det G` is computed.

use std::cell::RefCell;
use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::holomorphic::ComplexPoint;
use crate::kernels::KernelSpec;
use crate::linalg::{determinant, frobenius, CMatrix};
use crate::localization::localized_modulus;

pub const MIN_STEP: f64 = 1e-6;
pub const MAX_STEP: f64 = 1e-2;
pub const DEFAULT_STEP: f64 = 1e-3;

/// Number of times the step is halved when the stencil touches the margin.
pub const MAX_SHRINKS: u32 = 3;

/// Finite-difference scheme: base step and optional Richardson extrapolation
/// `(4·D_{h/2} − D_h)/3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SchemeJson", into = "SchemeJson")]
pub struct FdScheme {
    step: f64,
    richardson: bool,
}

#[derive(Serialize, Deserialize)]
struct SchemeJson {
    step: f64,
    richardson: bool,
}

impl TryFrom<SchemeJson> for FdScheme {
    type Error = Error;
    fn try_from(j: SchemeJson) -> Result<Self> {
        FdScheme::new(j.step, j.richardson)
    }
}

impl From<FdScheme> for SchemeJson {
    fn from(s: FdScheme) -> Self {
        SchemeJson {
            step: s.step,
            richardson: s.richardson,
        }
    }
}

impl Default for FdScheme {
    fn default() -> Self {
        FdScheme {
            step: DEFAULT_STEP,
            richardson: true,
        }
    }
}

impl FdScheme {
    pub fn new(step: f64, richardson: bool) -> Result<Self> {
        if !(MIN_STEP..=MAX_STEP).contains(&step) {
            return Err(Error::invalid(
                "curvature",
                format!("step {} outside [{:e}, {:e}]", step, MIN_STEP, MAX_STEP),
            ));
        }
        Ok(FdScheme { step, richardson })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn richardson(&self) -> bool {
        self.richardson
    }
}

impl std::fmt::Display for FdScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "h={:e}", self.step)?;
        if self.richardson {
            write!(f, "+richardson")?;
        }
        Ok(())
    }
}

/// Real direction `r` of ℂⁿ: `Re z_{r/2}` for even `r`, `Im z_{r/2}` for odd.
fn real_direction(r: usize, amount: f64) -> (usize, Complex64) {
    if r % 2 == 0 {
        (r / 2, Complex64::new(amount, 0.0))
    } else {
        (r / 2, Complex64::new(0.0, amount))
    }
}

/// Evaluates `g` on an integer lattice `z + unit·offset`, caching values.
struct Lattice<'a, G> {
    g: &'a G,
    z: &'a ComplexPoint,
    unit: f64,
    cache: RefCell<HashMap<Vec<i32>, f64>>,
}

impl<G> Lattice<'_, G>
where
    G: Fn(&ComplexPoint) -> Result<f64>,
{
    fn point(&self, offset: &[i32]) -> ComplexPoint {
        let mut p = self.z.clone();
        for (r, &k) in offset.iter().enumerate() {
            if k != 0 {
                let (var, delta) = real_direction(r, k as f64 * self.unit);
                p = p.shifted(var, delta);
            }
        }
        p
    }

    fn value(&self, offset: Vec<i32>) -> Result<f64> {
        if let Some(v) = self.cache.borrow().get(&offset) {
            return Ok(*v);
        }
        let v = (self.g)(&self.point(&offset))?;
        self.cache.borrow_mut().insert(offset, v);
        Ok(v)
    }

    /// Second derivative along real directions `a`, `b` with step `k·unit`.
    fn second(&self, a: usize, b: usize, k: i32) -> Result<f64> {
        let n = 2 * self.z.dim();
        let at = |sa: i32, sb: i32| {
            let mut off = vec![0; n];
            off[a] += sa * k;
            off[b] += sb * k;
            off
        };
        let h = k as f64 * self.unit;
        if a == b {
            let f0 = self.value(vec![0; n])?;
            Ok((self.value(at(1, 0))? - 2.0 * f0 + self.value(at(-1, 0))?) / (h * h))
        } else {
            let s = self.value(at(1, 1))? - self.value(at(1, -1))? - self.value(at(-1, 1))? + self.value(at(-1, -1))?;
            Ok(s / (4.0 * h * h))
        }
    }

    /// `∂²g/∂z_i∂z̄_j = ¼[D(x_i,x_j) + D(y_i,y_j) + i(D(x_i,y_j) − D(y_i,x_j))]`.
    fn hessian(&self, k: i32) -> Result<CMatrix> {
        let n = self.z.dim();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
                let re = self.second(xi, xj, k)? + self.second(yi, yj, k)?;
                let im = self.second(xi, yj, k)? - self.second(yi, xj, k)?;
                out[(i, j)] = Complex64::new(0.25 * re, 0.25 * im);
            }
        }
        Ok(out)
    }
}

/// Step actually used at `z`: `scheme.step` halved up to [`MAX_SHRINKS`]
/// times until every stencil point lies in `domain`.
fn admissible_step(z: &ComplexPoint, scheme: &FdScheme, domain: &Domain) -> Result<f64> {
    domain.check(z)?;
    let mut h = scheme.step;
    let mut shrinks = 0;
    loop {
        // The farthest stencil points are the diagonal corners.
        let outside = (0..z.dim()).flat_map(|v| {
            [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
                .into_iter()
                .map(move |(a, b)| z.shifted(v, Complex64::new(a * h, b * h)))
        });
        let mut bad = None;
        for p in outside {
            if !domain.contains(&p) {
                bad = Some(p);
                break;
            }
        }
        // Off-diagonal pairs across variables move two coordinates at once.
        if bad.is_none() && z.dim() > 1 {
            'pairs: for u in 0..z.dim() {
                for v in u + 1..z.dim() {
                    for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                        for (da, db) in [(1.0, 0.0), (0.0, 1.0)] {
                            let p = z
                                .shifted(u, Complex64::new(a * h * da, a * h * db))
                                .shifted(v, Complex64::new(b * h * da, b * h * db));
                            if !domain.contains(&p) {
                                bad = Some(p);
                                break 'pairs;
                            }
                        }
                    }
                }
            }
        }
        match bad {
            None => return Ok(h),
            Some(p) if shrinks >= MAX_SHRINKS || h / 2.0 < MIN_STEP => {
                return Err(Error::StencilExitsDomain {
                    step: h,
                    at: p.to_string(),
                })
            }
            Some(_) => {
                h /= 2.0;
                shrinks += 1;
            }
        }
    }
}

/// Full Wirtinger Hessian `[∂²/∂z_i∂z̄_j log field]` at `z`.
pub fn log_hessian<F>(field: F, z: &ComplexPoint, scheme: &FdScheme, domain: &Domain) -> Result<CMatrix>
where
    F: Fn(&ComplexPoint) -> Result<f64>,
{
    let h = admissible_step(z, scheme, domain)?;
    let g = |p: &ComplexPoint| -> Result<f64> {
        let v = field(p)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::NonPositiveField {
                value: v,
                at: p.to_string(),
            });
        }
        Ok(v.ln())
    };
    if scheme.richardson {
        let lattice = Lattice {
            g: &g,
            z,
            unit: h / 2.0,
            cache: RefCell::new(HashMap::new()),
        };
        let coarse = lattice.hessian(2)?;
        let fine = lattice.hessian(1)?;
        Ok((fine * Complex64::new(4.0, 0.0) - coarse) / Complex64::new(3.0, 0.0))
    } else {
        let lattice = Lattice {
            g: &g,
            z,
            unit: h,
            cache: RefCell::new(HashMap::new()),
        };
        lattice.hessian(1)
    }
}

/// `∂²/∂z_i∂z̄_j log field` at `z` (0-based indices).
pub fn mixed_partial_log<F>(
    field: F,
    z: &ComplexPoint,
    i: usize,
    j: usize,
    scheme: &FdScheme,
    domain: &Domain,
) -> Result<Complex64>
where
    F: Fn(&ComplexPoint) -> Result<f64>,
{
    if i >= z.dim() || j >= z.dim() {
        return Err(Error::DimensionMismatch {
            expected: z.dim(),
            got: i.max(j) + 1,
        });
    }
    Ok(log_hessian(field, z, scheme, domain)?[(i, j)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureKind {
    /// Rank one: the line-bundle curvature.
    Line,
    /// Rank above one: curvature of the determinant bundle.
    Determinant,
}

/// `Σ c_ij dz_i∧dz̄_j` at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureForm {
    point: ComplexPoint,
    #[serde(with = "crate::cjson::matrix")]
    coeffs: CMatrix,
    kind: CurvatureKind,
}

impl CurvatureForm {
    pub fn point(&self) -> &ComplexPoint {
        &self.point
    }

    pub fn coeffs(&self) -> &CMatrix {
        &self.coeffs
    }

    pub fn kind(&self) -> CurvatureKind {
        self.kind
    }

    pub fn coeff(&self, i: usize, j: usize) -> Complex64 {
        self.coeffs[(i, j)]
    }

    /// `max |c_ij − conj(c_ji)|`.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.coeffs.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.coeffs[(i, j)] - self.coeffs[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

/// `det G(z) = 1 / det K(z,z)` as a real number.
fn det_grammian(spec: &KernelSpec, z: &ComplexPoint) -> Result<f64> {
    let d = determinant(&spec.diagonal(z)?);
    Ok(1.0 / d.re)
}

pub fn curvature_form(spec: &KernelSpec, z: &ComplexPoint, scheme: &FdScheme) -> Result<CurvatureForm> {
    let hess = log_hessian(|p| det_grammian(spec, p), z, scheme, spec.domain())?;
    let kind = if spec.rank() == 1 {
        CurvatureKind::Line
    } else {
        CurvatureKind::Determinant
    };
    Ok(CurvatureForm {
        point: z.clone(),
        coeffs: hess * Complex64::new(-0.25, 0.0),
        kind,
    })
}

fn require_rank_one_pair(a: &KernelSpec, b: &KernelSpec, context: &'static str) -> Result<()> {
    if a.rank() != 1 || b.rank() != 1 {
        return Err(Error::RankMismatch {
            context,
            detail: format!("rank-one kernels required, got {} and {}", a.rank(), b.rank()),
        });
    }
    if a.domain() != b.domain() {
        return Err(Error::DomainMismatch { context });
    }
    Ok(())
}

/// `L(z) = −½ ∂∂̄ log μ(z)` for the modulus of the rank-one pair `(a, b)`.
pub fn log_modulus_form(a: &KernelSpec, b: &KernelSpec, z: &ComplexPoint, scheme: &FdScheme) -> Result<CMatrix> {
    require_rank_one_pair(a, b, "curvature")?;
    let mu = |p: &ComplexPoint| Ok(localized_modulus(a, b, p)?.scalar_modulus());
    Ok(log_hessian(mu, z, scheme, a.domain())? * Complex64::new(-0.5, 0.0))
}

/// `‖L(z) − (c_b(z) − c_a(z))‖_F`, where `L = −½ ∂∂̄ log μ(a, b)` and `c_a`,
/// `c_b` are the curvature forms of the two kernels. The two sides are
/// computed independently, so the residual measures their agreement.
pub fn curvature_difference_residual(
    a: &KernelSpec,
    b: &KernelSpec,
    z: &ComplexPoint,
    scheme: &FdScheme,
) -> Result<f64> {
    let l = log_modulus_form(a, b, z, scheme)?;
    let ca = curvature_form(a, z, scheme)?;
    let cb = curvature_form(b, z, scheme)?;
    Ok(frobenius(&(l - (cb.coeffs - ca.coeffs))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holomorphic::HoloExpr;

    fn z() -> HoloExpr {
        HoloExpr::var(1, 0)
    }

    #[test]
    fn scheme_range() {
        assert!(FdScheme::new(1e-7, true).is_err());
        assert!(FdScheme::new(0.02, false).is_err());
        assert_eq!(FdScheme::default().step(), 1e-3);
    }

    #[test]
    fn mixed_partial_examples() {
        let d = Domain::unit_disk();
        let s = FdScheme::default();
        let p = ComplexPoint::from_re_im(0.3, -0.2);
        let v = mixed_partial_log(|q| Ok(q.coord(0).norm_sqr().exp()), &p, 0, 0, &s, &d).unwrap();
        assert!((v - 1.0).norm() < 1e-6);

        let szego = KernelSpec::szego();
        let k = |q: &ComplexPoint| Ok(szego.diagonal(q)?[(0, 0)].re);
        let v = mixed_partial_log(k, &0.0.into(), 0, 0, &s, &d).unwrap();
        assert!((v - 1.0).norm() < 1e-6);

        let f = |q: &ComplexPoint| Ok((Complex64::new(1.0, 0.0) + q.coord(0) / 2.0).norm_sqr());
        let v = mixed_partial_log(f, &0.3.into(), 0, 0, &s, &d).unwrap();
        assert!(v.norm() < 1e-6);
    }

    #[test]
    fn mixed_partial_errors() {
        let d = Domain::unit_disk();
        let s = FdScheme::new(1e-2, false).unwrap();
        let r = mixed_partial_log(|_| Ok(1.0), &0.949.into(), 0, 0, &s, &d);
        assert!(matches!(r, Err(Error::StencilExitsDomain { .. })));
        let r = mixed_partial_log(|_| Ok(-1.0), &0.0.into(), 0, 0, &s, &d);
        assert!(matches!(r, Err(Error::NonPositiveField { .. })));
        // Close to the margin the step shrinks instead of failing.
        assert!(mixed_partial_log(|_| Ok(1.0), &0.945.into(), 0, 0, &s, &d).is_ok());
    }

    #[test]
    fn curvature_examples() {
        let s = FdScheme::default();
        let c = curvature_form(&KernelSpec::szego(), &0.0.into(), &s).unwrap();
        assert_eq!(c.kind(), CurvatureKind::Line);
        assert!((c.coeff(0, 0) - 0.25).norm() < 1e-6);
        let c = curvature_form(&KernelSpec::bergman(), &0.0.into(), &s).unwrap();
        assert!((c.coeff(0, 0) - 0.5).norm() < 1e-6);
        let conj = KernelSpec::szego().conjugate_scalar(2.0 + z()).unwrap();
        let c = curvature_form(&conj, &0.0.into(), &s).unwrap();
        assert!((c.coeff(0, 0) - 0.25).norm() < 1e-6);

        let ds = KernelSpec::szego().direct_sum(&KernelSpec::bergman()).unwrap();
        let c = curvature_form(&ds, &0.0.into(), &s).unwrap();
        assert_eq!(c.kind(), CurvatureKind::Determinant);
        assert!((c.coeff(0, 0) - 0.75).norm() < 1e-6);
    }

    #[test]
    fn difference_identity_examples() {
        let s = FdScheme::default();
        let sz = KernelSpec::szego();
        assert!(curvature_difference_residual(&sz, &sz, &0.3.into(), &s).unwrap() < 1e-8);
        let l = log_modulus_form(&sz, &KernelSpec::bergman(), &0.0.into(), &s).unwrap();
        assert!((l[(0, 0)] - 0.25).norm() < 1e-6);
        assert!(curvature_difference_residual(&sz, &KernelSpec::bergman(), &0.0.into(), &s).unwrap() < 1e-6);
        let conj = sz.conjugate_scalar(1.0 + 0.5 * z()).unwrap();
        assert!(curvature_difference_residual(&sz, &conj, &0.4.into(), &s).unwrap() < 1e-6);
        assert!(matches!(
            curvature_difference_residual(&sz, &KernelSpec::szego().direct_sum(&sz).unwrap(), &0.0.into(), &s),
            Err(Error::RankMismatch { .. })
        ));
    }

    #[test]
    fn polydisk_form_is_diagonal() {
        let spec = KernelSpec::polydisk(vec![1.0, 2.0]).unwrap();
        let c = curvature_form(&spec, &ComplexPoint::origin(2), &FdScheme::default()).unwrap();
        assert!((c.coeff(0, 0) - 0.25).norm() < 1e-6);
        assert!((c.coeff(1, 1) - 0.5).norm() < 1e-6);
        assert!(c.coeff(0, 1).norm() < 1e-6);
        assert!(c.hermitian_residual() < 1e-8);
    }
}
