//! Reproducible check suites over the builtin test set.
//!
//! Every check yields one [`CheckRecord`]. Records come out in a fixed order
//! and contain no timing data, so two runs produce identical reports.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::builtin;
use crate::curvature::{curvature_difference_residual, curvature_form, mixed_partial_log, FdScheme};
use crate::domain::Domain;
use crate::equivalence::{decide_rank_one, grammian_equality, verify_factorization, Verdict};
use crate::error::Result;
use crate::grid::{cell_centers, random_points, spiral_grid, square_lattice};
use crate::holomorphic::{antiholomorphy_residual, ComplexPoint, HoloExpr, HoloMatrix};
use crate::kernels::{hermitian_symmetry_residual, psd_check, KernelSpec};
use crate::linalg::{condition_number, CMatrix};
use crate::localization::{grammian, localized_modulus};
use crate::mapanalysis::{rank_profile, singular_fraction, singular_sets, DEFAULT_RANK_TOL};
use crate::oracle::{build_model, model_delta_adjoint_residual, model_projection_grammian};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub test: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Notes such as jittered factorizations or the error that aborted a check.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteKind {
    /// Every check, oracle checks included.
    Full,
    /// Only the sampled-model checks.
    Oracle,
}

/// Points of the 200-point spiral in `|z| ≤ 0.8` used by grid checks.
pub fn disk_test_grid() -> Vec<ComplexPoint> {
    spiral_grid(&Domain::unit_disk(), 0.8, 200).expect("0.8 is inside the disk")
}

/// 5×5 lattice over `[−0.49, 0.49]²`, inside `|z| ≤ 0.7`.
pub fn oracle_samples() -> Vec<ComplexPoint> {
    square_lattice(5, 0.49).expect("valid lattice")
}

#[derive(Default)]
struct Recorder {
    records: Vec<CheckRecord>,
}

impl Recorder {
    /// Passes when `residual ≤ tolerance`.
    fn bound(&mut self, test: impl Into<String>, r: Result<f64>, tolerance: f64) {
        self.outcome(test, r.map(|x| (x, x <= tolerance, Vec::new())), tolerance);
    }

    fn outcome(&mut self, test: impl Into<String>, r: Result<(f64, bool, Vec<String>)>, tolerance: f64) {
        let record = match r {
            Ok((residual, pass, flags)) => CheckRecord {
                test: test.into(),
                residual,
                tolerance,
                pass: pass && residual.is_finite(),
                flags,
            },
            Err(e) => CheckRecord {
                test: test.into(),
                residual: f64::NAN,
                tolerance,
                pass: false,
                flags: vec![e.to_string()],
            },
        };
        self.records.push(record);
    }
}

pub fn run_suite(kind: SuiteKind) -> Vec<CheckRecord> {
    let mut rec = Recorder::default();
    if kind == SuiteKind::Full {
        holomorphic_checks(&mut rec);
        kernel_checks(&mut rec);
        localization_checks(&mut rec);
        curvature_checks(&mut rec);
        equivalence_checks(&mut rec);
    }
    oracle_checks(&mut rec);
    if kind == SuiteKind::Full {
        mapanalysis_checks(&mut rec);
    }
    rec.records
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn z() -> HoloExpr {
    HoloExpr::var(1, 0)
}

fn max_over<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> Result<f64>) -> Result<f64> {
    items.into_iter().try_fold(0.0f64, |acc, t| Ok(acc.max(f(t)?)))
}

fn holomorphic_checks(rec: &mut Recorder) {
    let z1 = HoloExpr::var(2, 0);
    let z2 = HoloExpr::var(2, 1);
    let poly = (2.0 + z1) * z2;
    let r = (|| {
        let p = ComplexPoint::new(vec![c(1.0, 0.0), c(0.0, 1.0)])?;
        let a = (poly.eval(&p)? - c(0.0, 3.0)).norm();
        let b = ((1.0 / (1.0 - z())).eval(&0.5.into())? - 2.0).norm();
        Ok(a.max(b))
    })();
    rec.bound("holomorphic.eval_examples", r, 1e-14);
    let r = antiholomorphy_residual(|p| Ok(p.coord(0).conj()), &0.2.into(), 1e-4, &Domain::unit_disk());
    rec.bound("holomorphic.antiholomorphy_conjugate", r, 1e-8);
}

fn kernel_checks(rec: &mut Recorder) {
    for (k, (name, spec)) in builtin::specs().into_iter().enumerate() {
        let domain = *spec.domain();
        let seed = 100 + k as u64;
        let pts = random_points(&domain, 200, 0.9, seed);
        let r = max_over(pts.chunks(2), |pair| {
            hermitian_symmetry_residual(&spec, &pair[0], &pair[1])
        });
        rec.bound(format!("kernels.hermitian_symmetry.{}", name), r, 1e-12);

        let r = max_over(0..20u64, |s| {
            let size = 1 + (s as usize * 7) % 12;
            let pts = random_points(&domain, size, 0.9, seed * 1000 + s);
            Ok(-psd_check(&spec, &pts)?)
        });
        rec.bound(format!("kernels.psd.{}", name), r, 1e-10);
    }
}

fn localization_checks(rec: &mut Recorder) {
    let r = localized_modulus(&KernelSpec::szego(), &KernelSpec::bergman(), &0.6.into())
        .map(|d| (d.scalar_modulus() - 0.8).abs());
    rec.bound("localization.szego_bergman_modulus", r, 1e-12);
}

fn curvature_checks(rec: &mut Recorder) {
    let scheme = FdScheme::default();
    let origin = ComplexPoint::origin(1);
    for (name, spec, expected) in [
        ("szego", KernelSpec::szego(), 0.25),
        ("bergman", KernelSpec::bergman(), 0.5),
    ] {
        let r = curvature_form(&spec, &origin, &scheme).map(|f| (f.coeff(0, 0) - expected).norm());
        rec.bound(format!("curvature.origin.{}", name), r, 1e-6);
    }

    for (name, spec) in builtin::specs() {
        let p = random_points(spec.domain(), 1, 0.5, 7).remove(0);
        let r = curvature_form(&spec, &p, &scheme).map(|f| f.hermitian_residual());
        rec.bound(format!("curvature.hermitian.{}", name), r, 1e-8);
    }

    // Second-order convergence of the plain stencil against the closed form
    // ∂∂̄ log K_Szegő = (1 − |z|²)⁻².
    let r = (|| {
        let p = ComplexPoint::from_re_im(0.3, 0.2);
        let exact = (1.0 - p.norm_2().powi(2)).powi(-2);
        let s = KernelSpec::szego();
        let field = |q: &ComplexPoint| Ok(s.diagonal(q)?[(0, 0)].re);
        let d = Domain::unit_disk();
        let e1 = (mixed_partial_log(field, &p, 0, 0, &FdScheme::new(1e-3, false)?, &d)? - exact).norm();
        let e2 = (mixed_partial_log(field, &p, 0, 0, &FdScheme::new(5e-4, false)?, &d)? - exact).norm();
        Ok((e1 / e2 - 4.0).abs())
    })();
    rec.bound("curvature.fd_order_ratio", r, 0.5);

    let grid = disk_test_grid();
    let base = KernelSpec::szego();
    for (name, psi) in [("half_shift", builtin::half_shift()), ("two_plus_z", 2.0 + z())] {
        let r = base.conjugate_scalar(psi).and_then(|conj| {
            max_over(grid.iter().step_by(8), |p| {
                let a = curvature_form(&base, p, &scheme)?;
                let b = curvature_form(&conj, p, &scheme)?;
                Ok((a.coeff(0, 0) - b.coeff(0, 0)).norm())
            })
        });
        rec.bound(format!("curvature.conjugation_invariance.{}", name), r, 1e-6);
    }

    let specs = builtin::disk_rank_one_specs();
    for (i, (na, a)) in specs.iter().enumerate() {
        for (nb, b) in &specs[i + 1..] {
            let r = max_over(&grid, |p| curvature_difference_residual(a, b, p, &scheme));
            rec.bound(format!("curvature.difference_identity.{}__{}", na, nb), r, 1e-6);
        }
    }
}

fn equivalence_checks(rec: &mut Recorder) {
    let grid = disk_test_grid();
    let s = KernelSpec::szego();
    let tol = 1e-5;
    for (k, psi) in builtin::random_nonvanishing(10, 2024).into_iter().enumerate() {
        let r = s
            .conjugate_scalar(psi)
            .and_then(|conj| decide_rank_one(&s, &conj, &grid, tol))
            .map(|v| (v.max_residual, v.verdict == Verdict::Equivalent, Vec::new()));
        rec.outcome(format!("equivalence.random_conjugate.{}", k), r, tol);
    }

    let r = decide_rank_one(&s, &KernelSpec::bergman(), &grid, tol).map(|v| {
        let residual = v.witness_residual.map_or(f64::INFINITY, |w| (w - 1.0).abs());
        let pass =
            v.verdict == Verdict::Inequivalent && v.witness_point == Some(ComplexPoint::origin(1)) && residual <= 1e-4;
        (residual, pass, Vec::new())
    });
    rec.outcome("equivalence.szego_bergman_witness", r, 1e-4);

    let specs = builtin::disk_rank_one_specs();
    let r = max_over(
        specs.iter().step_by(2).zip(specs.iter().skip(1).step_by(2)),
        |((_, a), (_, b))| {
            let ab = decide_rank_one(a, b, &grid, tol)?;
            let ba = decide_rank_one(b, a, &grid, tol)?;
            Ok(if ab.verdict == ba.verdict {
                (ab.max_residual - ba.max_residual).abs()
            } else {
                f64::INFINITY
            })
        },
    );
    rec.bound("equivalence.symmetry", r, 1e-8);

    let pair: Vec<ComplexPoint> = vec![0.0.into(), 0.5.into()];
    let r = grammian_equality(&s, &KernelSpec::bergman(), &pair, 1e-10).map(|v| {
        let residual = v.witness_residual.map_or(f64::INFINITY, |w| (w - 0.1875).abs());
        let pass = v.verdict == Verdict::Inconclusive && v.witness_point == Some(0.5.into()) && residual <= 1e-12;
        (residual, pass, Vec::new())
    });
    rec.outcome("equivalence.grammian_szego_bergman", r, 1e-12);

    // A passing factorization must never coexist with an inequivalent verdict.
    let r = (|| {
        let psi0 = builtin::half_shift();
        let conj = s.conjugate_scalar(psi0.clone())?;
        let f = verify_factorization(&s, &conj, &HoloMatrix::scalar(psi0.recip()), &grid, 1e-10)?;
        let v = decide_rank_one(&s, &conj, &grid, tol)?;
        Ok((f.max_residual, f.pass && v.verdict != Verdict::Inequivalent, Vec::new()))
    })();
    rec.outcome("equivalence.factorization_consistency", r, 1e-10);
}

fn oracle_checks(rec: &mut Recorder) {
    let samples = oracle_samples();
    let specs = [
        ("szego", KernelSpec::szego()),
        ("bergman", KernelSpec::bergman()),
        ("szego_conj_half_shift", builtin::szego_conjugate()),
    ];
    let models: Vec<_> = specs.iter().map(|(_, s)| build_model(s, &samples)).collect();
    for (i, (na, _)) in specs.iter().enumerate() {
        for (j, (nb, _)) in specs.iter().enumerate() {
            let r = match (&models[i], &models[j]) {
                (Ok(a), Ok(b)) => max_over(0..samples.len(), |k| model_delta_adjoint_residual(a, b, k)).map(|res| {
                    let flags = [a, b]
                        .iter()
                        .filter_map(|m| m.jitter().map(|d| format!("jitter {:.3e}", d)))
                        .collect();
                    (res, res <= 1e-8, flags)
                }),
                (Err(e), _) | (_, Err(e)) => Err(e.clone()),
            };
            rec.outcome(format!("oracle.delta_adjoint.{}__{}", na, nb), r, 1e-8);
        }
    }

    for (k, (name, spec)) in builtin::specs().into_iter().enumerate() {
        let domain = *spec.domain();
        let base: Vec<ComplexPoint> = random_points(&domain, 3, 0.3, 500 + k as u64);
        let r = build_model(&spec, &base).and_then(|model| {
            let pts = random_points(&domain, 20, 0.9, 600 + k as u64);
            max_over(&pts, |p| {
                let diff: CMatrix = model_projection_grammian(&model, p)? - grammian(&spec, p)?;
                Ok(diff.iter().map(|v| v.norm()).fold(0.0, f64::max))
            })
        });
        rec.bound(format!("oracle.projection_grammian.{}", name), r, 1e-8);
    }

    let r = build_model(&KernelSpec::szego(), &[0.0.into()])
        .and_then(|m| model_projection_grammian(&m, &0.5.into()))
        .map(|g| (g[(0, 0)] - 0.75).norm());
    rec.bound("oracle.szego_half", r, 1e-10);

    // Arbitrary values are reproduced only to about cond(Γ)·ε, so this check
    // uses well-separated samples.
    let r = (|| {
        let spec = KernelSpec::szego().direct_sum(&KernelSpec::bergman())?;
        let spread: Vec<ComplexPoint> = std::iter::once(ComplexPoint::origin(1))
            .chain(
                (0..4)
                    .map(|k| ComplexPoint::scalar(Complex64::from_polar(0.6, k as f64 * std::f64::consts::FRAC_PI_2))),
            )
            .collect();
        let n = spread.len();
        let model = build_model(&spec, &spread)?;
        let values = CMatrix::from_fn(2 * n, 1, |i, _| c((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()));
        let residual = max_over(0..n, |j| {
            let got = model.inner(&values, &model.dual_kernel(j));
            Ok((0..2)
                .map(|i| (got[(i, 0)] - values[(2 * j + i, 0)]).norm())
                .fold(0.0, f64::max))
        })?;
        let flags = vec![format!("condition {:.3e}", condition_number(model.gram()))];
        Ok((residual, residual <= 1e-12, flags))
    })();
    rec.outcome("oracle.reproducing_identity", r, 1e-12);
}

fn mapanalysis_checks(rec: &mut Recorder) {
    let disk = Domain::unit_disk();
    let diag = HoloMatrix::diagonal(vec![z(), HoloExpr::one(1)]).expect("valid map");
    for n in [21, 41, 81] {
        let r = cell_centers(&disk, n, n, 0.8)
            .and_then(|g| rank_profile(&diag, &g, DEFAULT_RANK_TOL))
            .map(|p| {
                let nearest = p
                    .grid
                    .iter()
                    .min_by(|a, b| a.norm_2().total_cmp(&b.norm_2()))
                    .expect("nonempty grid");
                let sigma = &singular_sets(&p)[&1];
                let exact = sigma.count == 1 && &sigma.points[0] == nearest && !sigma.has_interior;
                (if exact { 0.0 } else { 1.0 }, exact, Vec::new())
            });
        rec.outcome(format!("mapanalysis.diag_z_1.sigma1_{}", n), r, 0.0);
    }

    for (name, psi, domain) in builtin::maps() {
        let sizes: &[usize] = if domain.dim() == 1 { &[21, 41, 81] } else { &[5, 9, 17] };
        let r = sizes
            .iter()
            .map(|&n| {
                let p = rank_profile(&psi, &cell_centers(&domain, n, n, 0.8)?, DEFAULT_RANK_TOL)?;
                let interior = singular_sets(&p).values().any(|s| s.has_interior);
                Ok((singular_fraction(&p), interior))
            })
            .collect::<Result<Vec<(f64, bool)>>>()
            .map(|fr| {
                let increase = fr.windows(2).map(|w| (w[1].0 - w[0].0).max(0.0)).fold(0.0, f64::max);
                let interior = fr.iter().any(|f| f.1);
                let flags = if interior {
                    vec!["singular set with interior".to_string()]
                } else {
                    Vec::new()
                };
                (increase, increase <= 0.0 && !interior, flags)
            });
        rec.outcome(format!("mapanalysis.thin_set.{}", name), r, 0.0);

        let r = cell_centers(&domain, 9, 9, 0.8).and_then(|g| {
            let lo = rank_profile(&psi, &g, 1e-10)?;
            let hi = rank_profile(&psi, &g, 1e-8)?;
            let changed = (0..g.len())
                .filter(|&i| lo.smallest_singular[i] > 1e-6 && lo.ranks[i] != hi.ranks[i])
                .count();
            Ok(changed as f64)
        });
        rec.bound(format!("mapanalysis.cutoff_stability.{}", name), r, 0.0);
    }

    let maps = builtin::maps();
    let disk_maps: Vec<_> = maps.iter().filter(|m| m.2.dim() == 1).collect();
    let r = cell_centers(&disk, 21, 21, 0.8).and_then(|g| {
        let mut violations = 0usize;
        for (_, a, _) in &disk_maps {
            for (_, b, _) in &disk_maps {
                let pa = rank_profile(a, &g, DEFAULT_RANK_TOL)?;
                let pb = rank_profile(b, &g, DEFAULT_RANK_TOL)?;
                let pab = rank_profile(&a.product(b)?, &g, DEFAULT_RANK_TOL)?;
                violations += (0..g.len())
                    .filter(|&i| pab.ranks[i] > pa.ranks[i].min(pb.ranks[i]))
                    .count();
            }
        }
        Ok(violations as f64)
    });
    rec.bound("mapanalysis.product_rank_bound", r, 0.0);
}
