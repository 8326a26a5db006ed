mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use common::{disk_point, nonvanishing_affine};
use qfhm::builtin;
use qfhm::grid::random_points;
use qfhm::kernels::{hermitian_symmetry_residual, psd_check, KernelSpec};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn builtin_kernels_are_hermitian(seed in any::<u64>()) {
        for (name, spec) in builtin::specs() {
            let pts = random_points(spec.domain(), 2, 0.9, seed);
            let r = hermitian_symmetry_residual(&spec, &pts[0], &pts[1]).unwrap();
            prop_assert!(r < 1e-12, "{}: {}", name, r);
        }
    }

    #[test]
    fn builtin_kernels_are_positive(seed in any::<u64>(), size in 1usize..=12) {
        for (name, spec) in builtin::specs() {
            let pts = random_points(spec.domain(), size, 0.9, seed);
            let m = psd_check(&spec, &pts).unwrap();
            prop_assert!(m >= -1e-10, "{}: {}", name, m);
        }
    }

    #[test]
    fn conjugation_scales_by_psi(psi in nonvanishing_affine(), z in disk_point(0.9), w in disk_point(0.9)) {
        let s = KernelSpec::szego();
        let c = s.conjugate_scalar(psi.clone()).unwrap();
        let expected = psi.eval(&z).unwrap() * s.eval(&z, &w).unwrap()[(0, 0)] * psi.eval(&w).unwrap().conj();
        prop_assert!((c.eval(&z, &w).unwrap()[(0, 0)] - expected).norm() < 1e-12 * (1.0 + expected.norm()));
    }

    #[test]
    fn weighted_disk_closed_form(lambda in 0.1..4.0f64, z in disk_point(0.9), w in disk_point(0.9)) {
        let k = KernelSpec::weighted_disk(lambda).unwrap().eval(&z, &w).unwrap()[(0, 0)];
        let base = Complex64::new(1.0, 0.0) - z.coord(0) * w.coord(0).conj();
        let expected = (base.ln() * -lambda).exp();
        prop_assert!((k - expected).norm() < 1e-11 * expected.norm());
    }

    #[test]
    fn combinators_act_entrywise(z in disk_point(0.9), w in disk_point(0.9)) {
        let s = KernelSpec::szego();
        let b = KernelSpec::bergman();
        let (ks, kb) = (s.eval(&z, &w).unwrap()[(0, 0)], b.eval(&z, &w).unwrap()[(0, 0)]);
        prop_assert!((s.sum(&b).unwrap().eval(&z, &w).unwrap()[(0, 0)] - (ks + kb)).norm() < 1e-12);
        prop_assert!((s.product(&b).unwrap().eval(&z, &w).unwrap()[(0, 0)] - ks * kb).norm() < 1e-12);
        let d = s.direct_sum(&b).unwrap().eval(&z, &w).unwrap();
        prop_assert_eq!(d.shape(), (2, 2));
        prop_assert!((d[(0, 0)] - ks).norm() < 1e-12 && (d[(1, 1)] - kb).norm() < 1e-12);
        prop_assert!(d[(0, 1)].norm() == 0.0 && d[(1, 0)].norm() == 0.0);
    }
}

#[test]
fn non_positive_weights_are_rejected() {
    assert!(KernelSpec::weighted_disk(0.0).is_err());
    assert!(KernelSpec::weighted_disk(-1.0).is_err());
    assert!(KernelSpec::polydisk(vec![1.0, -2.0]).is_err());
}

#[test]
fn duplicate_samples_are_rejected() {
    let p = random_points(&qfhm::domain::Domain::unit_disk(), 1, 0.5, 3);
    assert!(psd_check(&KernelSpec::szego(), &[p[0].clone(), p[0].clone()]).is_err());
}
