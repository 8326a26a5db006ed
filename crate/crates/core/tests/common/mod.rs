#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;

use qfhm::holomorphic::{ComplexPoint, HoloExpr};

/// A point of the disk `|z| < radius`.
pub fn disk_point(radius: f64) -> impl Strategy<Value = ComplexPoint> {
    (0.0..radius, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| ComplexPoint::scalar(Complex64::from_polar(r, t)))
}

pub fn complex(bound: f64) -> impl Strategy<Value = Complex64> {
    (-bound..bound, -bound..bound).prop_map(|(re, im)| Complex64::new(re, im))
}

/// `a + b z` with `|b| < |a|/2`, so it has no zero in the closed disk.
pub fn nonvanishing_affine() -> impl Strategy<Value = HoloExpr> {
    (
        0.5..2.0f64,
        0.0..std::f64::consts::TAU,
        0.0..0.45f64,
        0.0..std::f64::consts::TAU,
    )
        .prop_map(|(a, ta, b, tb)| {
            let a = Complex64::from_polar(a, ta);
            let b = a * Complex64::from_polar(b, tb);
            HoloExpr::constant(1, a) + b * HoloExpr::var(1, 0)
        })
}

/// `∂∂̄(−log(1 − |z|²)) = (1 − |z|²)^{-2}`.
pub fn disk_laplacian(z: &ComplexPoint) -> f64 {
    let s = 1.0 - z.norm_2().powi(2);
    1.0 / (s * s)
}
