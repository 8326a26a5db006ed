mod common;

use proptest::prelude::*;

use common::nonvanishing_affine;
use qfhm::domain::Domain;
use qfhm::equivalence::{classify, decide_rank_one, verify_factorization, Verdict};
use qfhm::grid::{domain_grid, spiral_grid};
use qfhm::holomorphic::{ComplexPoint, HoloMatrix};
use qfhm::kernels::KernelSpec;

fn grid() -> Vec<ComplexPoint> {
    domain_grid(&Domain::unit_disk(), 7, 7).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn conjugates_are_equivalent(psi in nonvanishing_affine()) {
        let a = KernelSpec::szego();
        let v = decide_rank_one(&a, &a.conjugate_scalar(psi).unwrap(), &grid(), 1e-5).unwrap();
        prop_assert_eq!(v.verdict, Verdict::Equivalent);
        prop_assert!(v.witness_point.is_none());
    }

    #[test]
    fn decision_is_symmetric(l1 in 0.5..3.0f64, l2 in 0.5..3.0f64) {
        let a = KernelSpec::weighted_disk(l1).unwrap();
        let b = KernelSpec::weighted_disk(l2).unwrap();
        let g = grid();
        let ab = decide_rank_one(&a, &b, &g, 1e-5).unwrap();
        let ba = decide_rank_one(&b, &a, &g, 1e-5).unwrap();
        prop_assert_eq!(ab.verdict, ba.verdict);
        prop_assert!((ab.max_residual - ba.max_residual).abs() <= 1e-6 * (1.0 + ab.max_residual));
    }

    #[test]
    fn passing_factorization_is_never_inequivalent(psi in nonvanishing_affine()) {
        let a = KernelSpec::szego();
        let b = a.conjugate_scalar(psi.clone()).unwrap();
        let g = grid();
        let candidate = HoloMatrix::scalar(qfhm::holomorphic::HoloExpr::one(1) / psi);
        let report = verify_factorization(&a, &b, &candidate, &g, 1e-8).unwrap();
        prop_assert!(report.pass, "residual {}", report.max_residual);
        prop_assert_ne!(decide_rank_one(&a, &b, &g, 1e-5).unwrap().verdict, Verdict::Inequivalent);
    }

    #[test]
    fn gray_band_scales_with_tolerance(scale in 1e-8..1e2f64, r in prop::collection::vec(0.0..20.0f64, 1..30)) {
        let g: Vec<ComplexPoint> = (0..r.len()).map(|k| ComplexPoint::from_re_im(k as f64 * 0.01, 0.0)).collect();
        let base = classify(&g, &r, 1.0);
        let scaled: Vec<f64> = r.iter().map(|x| x * scale).collect();
        let v = classify(&g, &scaled, scale);
        prop_assert_eq!(base.verdict, v.verdict);
        prop_assert_eq!(base.witness_point, v.witness_point);
    }
}

#[test]
fn gray_band_boundaries() {
    let g = vec![ComplexPoint::origin(1)];
    assert_eq!(classify(&g, &[1.0], 1.0).verdict, Verdict::Equivalent);
    assert_eq!(classify(&g, &[5.0], 1.0).verdict, Verdict::Inconclusive);
    assert_eq!(classify(&g, &[10.0], 1.0).verdict, Verdict::Inconclusive);
    assert_eq!(classify(&g, &[10.5], 1.0).verdict, Verdict::Inequivalent);
}

#[test]
fn szego_bergman_witness_at_origin() {
    let g = spiral_grid(&Domain::unit_disk(), 0.8, 200).unwrap();
    let v = decide_rank_one(&KernelSpec::szego(), &KernelSpec::bergman(), &g, 1e-5).unwrap();
    assert_eq!(v.verdict, Verdict::Inequivalent);
    assert_eq!(v.witness_point, Some(ComplexPoint::origin(1)));
    assert!((v.witness_residual.unwrap() - 1.0).abs() < 1e-4);
}

#[test]
fn matrix_kernels_are_refused() {
    let a = KernelSpec::szego().direct_sum(&KernelSpec::bergman()).unwrap();
    assert!(decide_rank_one(&a, &a, &grid(), 1e-5).is_err());
}
