mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use common::{complex, disk_point, nonvanishing_affine};
use qfhm::holomorphic::{wirtinger_derivative, ComplexPoint, HoloExpr};

fn z() -> HoloExpr {
    HoloExpr::var(1, 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_matches_horner(coeffs in prop::collection::vec(complex(2.0), 1..6), p in disk_point(0.95)) {
        let terms: Vec<(Complex64, Vec<u32>)> =
            coeffs.iter().enumerate().map(|(k, &c)| (c, vec![k as u32])).collect();
        let f = HoloExpr::polynomial(1, &terms).unwrap();
        let x = p.coord(0);
        let horner = coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c);
        prop_assert!((f.eval(&p).unwrap() - horner).norm() < 1e-12);
    }

    #[test]
    fn derivative_matches_difference_quotient(psi in nonvanishing_affine(), q in nonvanishing_affine(), p in disk_point(0.8)) {
        let f = psi.clone() * psi.clone() / q;
        let h = 1e-5;
        let fd = (f.eval(&p.shifted(0, Complex64::new(h, 0.0))).unwrap()
            - f.eval(&p.shifted(0, Complex64::new(-h, 0.0))).unwrap()) / (2.0 * h);
        let d = wirtinger_derivative(&f, &p, 0).unwrap();
        prop_assert!((d - fd).norm() < 1e-6 * (1.0 + d.norm()), "{} vs {}", d, fd);
    }

    #[test]
    fn rational_form_agrees(psi in nonvanishing_affine(), q in nonvanishing_affine(), p in disk_point(0.9)) {
        let f = (psi.clone() + z() * q.clone()) / (psi * q);
        let (num, den) = f.to_rational();
        let via_parts = num.to_expr().eval(&p).unwrap() / den.to_expr().eval(&p).unwrap();
        let direct = f.eval(&p).unwrap();
        prop_assert!((via_parts - direct).norm() < 1e-10 * (1.0 + direct.norm()));
    }

    #[test]
    fn json_round_trip(psi in nonvanishing_affine(), q in nonvanishing_affine(), p in disk_point(0.9)) {
        let f = psi / q;
        let text = serde_json::to_string(&f).unwrap();
        let back: HoloExpr = serde_json::from_str(&text).unwrap();
        prop_assert!((back.eval(&p).unwrap() - f.eval(&p).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn dilation_is_substitution(psi in nonvanishing_affine(), t in 0.0..1.0f64, p in disk_point(0.9)) {
        let f = psi.clone() * psi;
        let lhs = f.dilate(Complex64::new(t, 0.0)).eval(&p).unwrap();
        let rhs = f.eval(&p.scaled(t)).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }
}

#[test]
fn pole_is_reported() {
    let f = HoloExpr::one(1) / (0.5 - z());
    assert!(f.eval(&ComplexPoint::from_re_im(0.5, 0.0)).is_err());
}
