//! Finite sampled model of a kernel space, used as an exact linear-algebra
//! check on the closed-form paths.
//!
//! Elements are represented by their value vectors at `N` sample points and
//! carry the minimum-norm-interpolant inner product `⟨u, v⟩ = v* Γ⁻¹ u`,
//! where `Γ` is the `Nm × Nm` block Gram matrix `[K(w_j, w_k)]`. On the span
//! of the dual kernels at the samples this is the true geometry of the
//! kernel space, so identities about dual kernels become finite identities.
//!
//! With canonical generators on both sides the canonical map `δ` is the
//! identity on value vectors and its adjoint is `Γ_A Γ_B⁻¹`; it must send
//! each dual kernel of the second module to the corresponding dual kernel of
//! the first.

use std::borrow::Cow;

use nalgebra::{Cholesky, Dyn};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::holomorphic::ComplexPoint;
use crate::kernels::KernelSpec;
use crate::linalg::{frobenius, hermitian_eigenvalues, hermitize, identity, inverse_hpd, CMatrix};
use crate::localization::change_of_basis;

/// Largest `N·m` accepted by [`build_model`].
pub const MAX_MODEL_SIZE: usize = 2000;

/// Relative diagonal jitter applied when the Gram matrix does not factor.
pub const JITTER_SCALE: f64 = 1e-12;

/// Minimum eigenvalue below which a Gram matrix is declared not positive.
pub const NOT_POSITIVE_THRESHOLD: f64 = -1e-6;

#[derive(Clone)]
pub struct SampledModel {
    spec: KernelSpec,
    samples: Vec<ComplexPoint>,
    gram: CMatrix,
    factor: Cholesky<Complex64, Dyn>,
    jitter: Option<f64>,
    min_eigenvalue: f64,
}

impl std::fmt::Debug for SampledModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SampledModel")
            .field("samples", &self.samples.len())
            .field("rank", &self.spec.rank())
            .field("jitter", &self.jitter)
            .field("min_eigenvalue", &self.min_eigenvalue)
            .finish()
    }
}

/// Cholesky factorization that also fails on a nonpositive pivot. The complex
/// square root happily returns an imaginary pivot, so a successful
/// factorization alone does not prove positivity.
fn cholesky(a: CMatrix) -> Option<Cholesky<Complex64, Dyn>> {
    let f = Cholesky::new(a)?;
    let l = f.l_dirty();
    let real_pivots = (0..l.nrows()).all(|i| {
        let d = l[(i, i)];
        d.re > 0.0 && d.im.abs() <= 1e-12 * d.re
    });
    real_pivots.then_some(f)
}

/// Assembles and factors the block Gram matrix of `spec` over `samples`.
///
/// The Cholesky factorization is retried once with `δ·I`,
/// `δ = 1e-12 · tr Γ / (Nm)`, if the plain matrix does not factor; the
/// jitter is reported by [`SampledModel::jitter`].
pub fn build_model(spec: &KernelSpec, samples: &[ComplexPoint]) -> Result<SampledModel> {
    if samples.is_empty() {
        return Err(Error::invalid("oracle", "a sampled model needs at least one sample"));
    }
    let size = samples.len() * spec.rank();
    if size > MAX_MODEL_SIZE {
        return Err(Error::invalid(
            "oracle",
            format!("model size N·m = {} exceeds {}", size, MAX_MODEL_SIZE),
        ));
    }
    for j in 0..samples.len() {
        for k in j + 1..samples.len() {
            if samples[j] == samples[k] {
                return Err(Error::DuplicatePoints { first: j, second: k });
            }
        }
    }
    let gram = spec.block_gram(samples)?;
    let min_eigenvalue = hermitian_eigenvalues(&gram)[0];
    if min_eigenvalue < NOT_POSITIVE_THRESHOLD {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    let herm = hermitize(&gram);
    let (factor, jitter) = match cholesky(herm.clone()) {
        Some(f) => (f, None),
        None => {
            let delta = JITTER_SCALE * herm.trace().re / size as f64;
            let shifted = &herm + identity(size) * Complex64::new(delta, 0.0);
            let f = cholesky(shifted).ok_or(Error::NotPositive { min_eigenvalue })?;
            (f, Some(delta))
        }
    };
    Ok(SampledModel {
        spec: spec.clone(),
        samples: samples.to_vec(),
        gram,
        factor,
        jitter,
        min_eigenvalue,
    })
}

impl SampledModel {
    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn samples(&self) -> &[ComplexPoint] {
        &self.samples
    }

    pub fn rank(&self) -> usize {
        self.spec.rank()
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    /// Diagonal shift used to factor the Gram matrix, if any.
    pub fn jitter(&self) -> Option<f64> {
        self.jitter
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn index_of(&self, z: &ComplexPoint) -> Option<usize> {
        self.samples.iter().position(|s| s == z)
    }

    /// `Γ⁻¹ rhs` through the stored factorization.
    pub fn solve(&self, rhs: &CMatrix) -> CMatrix {
        self.factor.solve(rhs)
    }

    /// Value vectors (as columns) of the dual kernels `K(·, w_j) eᵢ`, i.e. the
    /// j-th column block of `Γ`.
    pub fn dual_kernel(&self, j: usize) -> CMatrix {
        let m = self.rank();
        self.gram.columns(j * m, m).into_owned()
    }

    /// Matrix of model inner products `[⟨uₚ, v_q⟩]_{q,p} = V* Γ⁻¹ U` for value
    /// vectors stored as the columns of `u` and `v`.
    pub fn inner(&self, u: &CMatrix, v: &CMatrix) -> CMatrix {
        v.adjoint() * self.solve(u)
    }

    fn same_samples(&self, other: &SampledModel) -> bool {
        self.rank() == other.rank() && self.samples == other.samples
    }
}

/// `‖Γ_A Γ_B⁻¹ k′_j − k_j X(w_j)‖_F`, where `k_j`, `k′_j` are the dual-kernel
/// blocks of the two models at sample `j` and `X = I` for canonical
/// generators. Zero in exact arithmetic.
pub fn model_delta_adjoint_residual(model_a: &SampledModel, model_b: &SampledModel, j: usize) -> Result<f64> {
    if !model_a.same_samples(model_b) {
        return Err(Error::SampleMismatch);
    }
    if j >= model_a.samples.len() {
        return Err(Error::invalid("oracle", format!("sample index {} out of range", j)));
    }
    let m = model_a.rank();
    let (_, x) = change_of_basis(&identity(m), &identity(m))?;
    let dual_b = model_b.dual_kernel(j);
    let adjoint_image = &model_a.gram * model_b.solve(&dual_b);
    let expected = model_a.dual_kernel(j) * x;
    Ok(frobenius(&(adjoint_image - expected)))
}

/// Gram matrix of the projections of the constant generators onto the span
/// of the dual kernels at `z`, computed inside the model. If `z` is not a
/// sample the model is rebuilt with `z` appended.
pub fn model_projection_grammian(model: &SampledModel, z: &ComplexPoint) -> Result<CMatrix> {
    let model: Cow<'_, SampledModel> = match model.index_of(z) {
        Some(_) => Cow::Borrowed(model),
        None => {
            let mut samples = model.samples.clone();
            samples.push(z.clone());
            Cow::Owned(build_model(&model.spec, &samples)?)
        }
    };
    let idx = model.index_of(z).expect("z is a sample");
    let dual = model.dual_kernel(idx);
    // ⟨k^l_z, k^p_z⟩ in the model; the projection of fᵢ has coefficients
    // solving this system against eᵢ (reproducing property).
    let dual_gram = hermitize(&model.inner(&dual, &dual));
    inverse_hpd(&dual_gram, "oracle")
}
