//! Exact polynomial and rational functions of several complex variables.
//!
//! These are the multipliers, module maps and conjugating factors used by the
//! rest of the crate. Expressions are trees, so derivatives are symbolic and
//! the dilation `z ↦ f(t·z)` is a substitution.

mod expr;
mod json;
mod matrix;
mod point;

use num_complex::Complex64;

pub use expr::{HoloExpr, Polynomial, NONVANISHING_FLOOR, POLE_THRESHOLD};
pub use matrix::HoloMatrix;
pub use point::ComplexPoint;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

pub fn eval(expr: &HoloExpr, z: &ComplexPoint) -> Result<Complex64> {
    expr.eval(z)
}

/// `∂/∂z_var` of `expr` at `z` (0-based variable index).
pub fn wirtinger_derivative(expr: &HoloExpr, z: &ComplexPoint, var: usize) -> Result<Complex64> {
    if var >= expr.dim() {
        return Err(Error::DimensionMismatch {
            expected: expr.dim(),
            got: var + 1,
        });
    }
    expr.derivative(var).eval(z)
}

pub fn eval_matrix(m: &HoloMatrix, z: &ComplexPoint) -> Result<CMatrix> {
    m.eval(z)
}

/// Largest `|∂f/∂z_j|` at `z`, estimated with central differences and the
/// Wirtinger combination `∂/∂z = ½(∂_x − i∂_y)`.
///
/// A value near zero certifies that `field` is anti-holomorphic at `z`.
pub fn antiholomorphy_residual<F>(field: F, z: &ComplexPoint, step: f64, domain: &Domain) -> Result<f64>
where
    F: Fn(&ComplexPoint) -> Result<Complex64>,
{
    if !(step > 0.0) {
        return Err(Error::invalid("holomorphic", "finite-difference step must be positive"));
    }
    let mut worst: f64 = 0.0;
    for j in 0..z.dim() {
        let sample = |delta: Complex64| -> Result<Complex64> {
            let p = z.shifted(j, delta);
            if !domain.contains(&p) {
                return Err(Error::StepTooLarge {
                    step,
                    at: p.to_string(),
                });
            }
            field(&p)
        };
        let h = Complex64::new(step, 0.0);
        let ih = Complex64::new(0.0, step);
        let dx = (sample(h)? - sample(-h)?) / (2.0 * step);
        let dy = (sample(ih)? - sample(-ih)?) / (2.0 * step);
        let dz = 0.5 * (dx - Complex64::i() * dy);
        worst = worst.max(dz.norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_field_is_antiholomorphic() {
        let z = ComplexPoint::from(0.2);
        let r = antiholomorphy_residual(|p| Ok(p.coord(0).conj()), &z, 1e-4, &Domain::unit_disk()).unwrap();
        assert!(r < 1e-8);
    }

    #[test]
    fn identity_field_has_unit_residual() {
        let z = ComplexPoint::from(0.2);
        let r = antiholomorphy_residual(|p| Ok(p.coord(0)), &z, 1e-4, &Domain::unit_disk()).unwrap();
        assert!((r - 1.0).abs() < 1e-8);
    }

    #[test]
    fn step_leaving_domain_is_rejected() {
        let z = ComplexPoint::from(0.94);
        let r = antiholomorphy_residual(|p| Ok(p.coord(0)), &z, 0.02, &Domain::unit_disk());
        assert!(matches!(r, Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn derivative_variable_out_of_range() {
        let e = HoloExpr::var(1, 0);
        assert!(wirtinger_derivative(&e, &0.0.into(), 1).is_err());
    }
}
