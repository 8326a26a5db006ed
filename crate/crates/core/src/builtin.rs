//! The builtin test set: kernel families, combinators and multipliers used
//! by the check suite and the property tests.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::Domain;
use crate::holomorphic::{HoloExpr, HoloMatrix};
use crate::kernels::{real_diagonal, KernelSpec};

fn z() -> HoloExpr {
    HoloExpr::var(1, 0)
}

/// `1 + z/2`, nonvanishing on the closed disk.
pub fn half_shift() -> HoloExpr {
    1.0 + 0.5 * z()
}

/// Szegő kernel conjugated by `1 + z/2`.
pub fn szego_conjugate() -> KernelSpec {
    KernelSpec::szego()
        .conjugate_scalar(half_shift())
        .expect("valid builtin")
}

/// Every builtin kernel with a short name, covering each family and each
/// combinator.
pub fn specs() -> Vec<(&'static str, KernelSpec)> {
    let s = KernelSpec::szego();
    let b = KernelSpec::bergman();
    let ds = s.direct_sum(&b).expect("valid builtin");
    let shear = HoloMatrix::from_rows(vec![
        vec![HoloExpr::one(1), 0.5 * z()],
        vec![HoloExpr::zero(1), 2.0 + z()],
    ])
    .expect("valid builtin");
    vec![
        ("szego", s.clone()),
        ("bergman", b.clone()),
        (
            "weighted_disk_0.5",
            KernelSpec::weighted_disk(0.5).expect("valid builtin"),
        ),
        ("szego_conj_half_shift", szego_conjugate()),
        (
            "szego_conj_two_plus_z",
            s.conjugate_scalar(2.0 + z()).expect("valid builtin"),
        ),
        ("sum_szego_bergman", s.sum(&b).expect("valid builtin")),
        ("product_szego_bergman", s.product(&b).expect("valid builtin")),
        (
            "sum_szego_constant",
            s.sum(&KernelSpec::constant(Domain::unit_disk(), real_diagonal(&[1.0])).expect("valid builtin"))
                .expect("valid builtin"),
        ),
        ("direct_sum_szego_bergman", ds.clone()),
        ("direct_sum_conj_shear", ds.conjugate(shear).expect("valid builtin")),
        (
            "polydisk_1_2",
            KernelSpec::polydisk(vec![1.0, 2.0]).expect("valid builtin"),
        ),
        ("ball2_hardy", KernelSpec::ball(2, 2.0).expect("valid builtin")),
        ("ball2_bergman", KernelSpec::ball(2, 3.0).expect("valid builtin")),
    ]
}

/// Rank-one kernels on the unit disk.
pub fn disk_rank_one_specs() -> Vec<(&'static str, KernelSpec)> {
    specs()
        .into_iter()
        .filter(|(_, s)| s.rank() == 1 && s.domain() == &Domain::unit_disk())
        .collect()
}

/// Square multipliers with nonconstant determinant, with their domains.
pub fn maps() -> Vec<(&'static str, HoloMatrix, Domain)> {
    let disk = Domain::unit_disk();
    let z1 = HoloExpr::var(2, 0);
    let z2 = HoloExpr::var(2, 1);
    vec![
        (
            "diag_z_1",
            HoloMatrix::diagonal(vec![z(), HoloExpr::one(1)]).expect("valid builtin"),
            disk,
        ),
        (
            "diag_z_z",
            HoloMatrix::diagonal(vec![z(), z()]).expect("valid builtin"),
            disk,
        ),
        (
            "upper_shift",
            HoloMatrix::from_rows(vec![
                vec![z() - HoloExpr::real(1, 0.3), HoloExpr::one(1)],
                vec![HoloExpr::zero(1), 1.0 + z()],
            ])
            .expect("valid builtin"),
            disk,
        ),
        (
            "jordan_z1_z2",
            HoloMatrix::from_rows(vec![vec![z1.clone(), z2], vec![HoloExpr::zero(2), z1]]).expect("valid builtin"),
            Domain::polydisk(2).expect("valid builtin"),
        ),
    ]
}

/// `count` seeded Möbius-type multipliers `(a + b z)/(c + d z)` with
/// `|b| ≤ 0.7|a|`, `|d| ≤ 0.7|c|`, so neither numerator nor denominator
/// vanishes on the closed disk.
pub fn random_nonvanishing(count: usize, seed: u64) -> Vec<HoloExpr> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let a = Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let b = Complex64::from_polar(
            0.7 * a.norm() * rng.gen::<f64>(),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        HoloExpr::constant(1, a) + b * z()
    };
    (0..count)
        .map(|_| {
            let num = draw(&mut rng);
            let den = draw(&mut rng);
            num / den
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_valid() {
        assert_eq!(specs().len(), 13);
        assert_eq!(disk_rank_one_specs().len(), 8);
        assert_eq!(maps().len(), 4);
        let psi = random_nonvanishing(10, 1);
        for p in &psi {
            KernelSpec::szego().conjugate_scalar(p.clone()).unwrap();
        }
    }
}
