mod common;

use proptest::prelude::*;

use qfhm::builtin;
use qfhm::grid::random_points;
use qfhm::localization::grammian;
use qfhm::oracle::{build_model, model_delta_adjoint_residual, model_projection_grammian};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn projection_reproduces_the_grammian(seed in any::<u64>(), n in 1usize..6) {
        for (name, spec) in builtin::specs() {
            let samples = random_points(spec.domain(), n, 0.5, seed);
            let model = build_model(&spec, &samples).unwrap();
            let z = random_points(spec.domain(), 1, 0.9, seed ^ 0xabcdef).remove(0);
            let diff = model_projection_grammian(&model, &z).unwrap() - grammian(&spec, &z).unwrap();
            let err = diff.iter().map(|v| v.norm()).fold(0.0, f64::max);
            prop_assert!(err < 1e-8, "{}: {}", name, err);
        }
    }

    #[test]
    fn delta_adjoint_identity_on_random_samples(seed in any::<u64>(), n in 2usize..10) {
        let specs = builtin::disk_rank_one_specs();
        let samples = random_points(specs[0].1.domain(), n, 0.6, seed);
        let models: Vec<_> = specs.iter().map(|(_, s)| build_model(s, &samples).unwrap()).collect();
        for a in &models {
            for b in &models {
                for j in 0..n {
                    let r = model_delta_adjoint_residual(a, b, j).unwrap();
                    prop_assert!(r < 1e-8, "{}", r);
                }
            }
        }
    }
}

#[test]
fn mismatched_models_are_rejected() {
    let s = qfhm::kernels::KernelSpec::szego();
    let a = build_model(&s, &random_points(s.domain(), 3, 0.5, 1)).unwrap();
    let b = build_model(&s, &random_points(s.domain(), 3, 0.5, 2)).unwrap();
    assert!(model_delta_adjoint_residual(&a, &b, 0).is_err());
}
