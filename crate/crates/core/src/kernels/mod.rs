//! Matrix-valued reproducing kernels built from a small combinator algebra.
//!
//! A [`KernelSpec`] describes `K(z, w)`, an m×m matrix for each pair of
//! points of a [`Domain`]. The module it defines is the reproducing-kernel
//! space of `K`, generated by the constant sections `1 ⊗ eᵢ`; the dual kernel
//! function for the i-th generator at `z` is `K(·, z)eᵢ`.
//!
//! Builtin families are scalar (rank one):
//!
//! * `weighted_disk(λ)`: `(1 − z w̄)^{−λ}` on the disk. `λ = 1` is the Szegő
//!   kernel, `λ = 2` the Bergman kernel.
//! * `polydisk([λ₁, …, λₙ])`: `Π (1 − zᵢ w̄ᵢ)^{−λᵢ}`.
//! * `ball(λ)`: `(1 − ⟨z, w⟩)^{−λ}`.
//!
//! Combinators: `conjugate` (`Ψ(z) K(z,w) Ψ(w)*`), entrywise `sum`, `product`
//! (scalar times matrix, or Schur product of equal ranks) and `direct_sum`
//! (block diagonal).

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use crate::domain::DEFAULT_MARGIN;
use crate::domain::{Domain, DomainKind, RawDomain};
use crate::error::{Error, Result};
use crate::holomorphic::{ComplexPoint, HoloExpr, HoloMatrix};
use crate::linalg::{block_diagonal, frobenius, hermitian_eigenvalues, CMatrix};

/// Expression tree of a kernel; see the module documentation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelNode {
    WeightedDisk {
        lambda: f64,
    },
    Polydisk {
        lambdas: Vec<f64>,
    },
    Ball {
        lambda: f64,
    },
    /// `K(z, w) = C` for every pair. Hermitian positive semidefinite `C`
    /// gives a (degenerate) kernel; anything else is only useful for
    /// exercising the validity checks.
    Constant {
        #[serde(with = "crate::cjson::matrix")]
        matrix: CMatrix,
    },
    Conjugate {
        psi: HoloMatrix,
        base: Box<KernelNode>,
    },
    Sum {
        a: Box<KernelNode>,
        b: Box<KernelNode>,
    },
    Product {
        a: Box<KernelNode>,
        b: Box<KernelNode>,
    },
    DirectSum {
        a: Box<KernelNode>,
        b: Box<KernelNode>,
    },
}

fn positive(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "kernels",
            format!("weight λ = {} must be positive", lambda),
        ))
    }
}

/// `base^{−λ}`; integer weights use repeated multiplication.
fn neg_power(base: Complex64, lambda: f64) -> Complex64 {
    if lambda.fract() == 0.0 && lambda <= 64.0 {
        base.powi(-(lambda as i32))
    } else {
        base.powf(-lambda)
    }
}

impl KernelNode {
    /// Validates the subtree against `domain` and returns its rank.
    fn validate(&self, domain: &Domain) -> Result<usize> {
        match self {
            KernelNode::WeightedDisk { lambda } => {
                positive(*lambda)?;
                if domain.dim() != 1 {
                    return Err(Error::invalid(
                        "kernels",
                        "weighted_disk needs a one-dimensional domain",
                    ));
                }
                Ok(1)
            }
            KernelNode::Polydisk { lambdas } => {
                if lambdas.len() != domain.dim() {
                    return Err(Error::invalid(
                        "kernels",
                        format!(
                            "polydisk kernel has {} weights for a {}-dimensional domain",
                            lambdas.len(),
                            domain.dim()
                        ),
                    ));
                }
                if domain.kind() == DomainKind::Ball && domain.dim() > 1 {
                    return Err(Error::invalid("kernels", "polydisk kernel is not defined on the ball"));
                }
                lambdas.iter().try_for_each(|l| positive(*l))?;
                Ok(1)
            }
            KernelNode::Ball { lambda } => {
                positive(*lambda)?;
                if domain.kind() == DomainKind::Polydisk && domain.dim() > 1 {
                    return Err(Error::invalid("kernels", "ball kernel is not defined on the polydisk"));
                }
                Ok(1)
            }
            KernelNode::Constant { matrix } => {
                if !matrix.is_square() || matrix.nrows() == 0 {
                    return Err(Error::invalid(
                        "kernels",
                        "constant kernel must be a nonempty square matrix",
                    ));
                }
                if matrix.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                    return Err(Error::invalid("kernels", "constant kernel has non-finite entries"));
                }
                Ok(matrix.nrows())
            }
            KernelNode::Conjugate { psi, base } => {
                let m = base.validate(domain)?;
                if psi.rows() != m || psi.cols() != m {
                    return Err(Error::RankMismatch {
                        context: "kernels",
                        detail: format!(
                            "conjugating {}x{} multiplier on a rank-{} kernel",
                            psi.rows(),
                            psi.cols(),
                            m
                        ),
                    });
                }
                psi.check_invertible_on(domain)?;
                Ok(m)
            }
            KernelNode::Sum { a, b } => {
                let (ra, rb) = (a.validate(domain)?, b.validate(domain)?);
                if ra != rb {
                    return Err(Error::RankMismatch {
                        context: "kernels",
                        detail: format!("sum of ranks {} and {}", ra, rb),
                    });
                }
                Ok(ra)
            }
            KernelNode::Product { a, b } => {
                let (ra, rb) = (a.validate(domain)?, b.validate(domain)?);
                if ra != rb && ra != 1 && rb != 1 {
                    return Err(Error::RankMismatch {
                        context: "kernels",
                        detail: format!("product of ranks {} and {}", ra, rb),
                    });
                }
                Ok(ra.max(rb))
            }
            KernelNode::DirectSum { a, b } => Ok(a.validate(domain)? + b.validate(domain)?),
        }
    }

    fn eval(&self, z: &ComplexPoint, w: &ComplexPoint) -> Result<CMatrix> {
        let scalar = |v: Complex64| CMatrix::from_element(1, 1, v);
        let one = Complex64::new(1.0, 0.0);
        Ok(match self {
            KernelNode::WeightedDisk { lambda } => scalar(neg_power(one - z.coord(0) * w.coord(0).conj(), *lambda)),
            KernelNode::Polydisk { lambdas } => scalar(
                lambdas
                    .iter()
                    .enumerate()
                    .map(|(i, l)| neg_power(one - z.coord(i) * w.coord(i).conj(), *l))
                    .product(),
            ),
            KernelNode::Ball { lambda } => {
                let inner: Complex64 = z.coords().iter().zip(w.coords()).map(|(a, b)| a * b.conj()).sum();
                scalar(neg_power(one - inner, *lambda))
            }
            KernelNode::Constant { matrix } => matrix.clone(),
            KernelNode::Conjugate { psi, base } => {
                let k = base.eval(z, w)?;
                psi.eval(z)? * k * psi.eval(w)?.adjoint()
            }
            KernelNode::Sum { a, b } => a.eval(z, w)? + b.eval(z, w)?,
            KernelNode::Product { a, b } => {
                let (ka, kb) = (a.eval(z, w)?, b.eval(z, w)?);
                if ka.shape() == kb.shape() {
                    ka.component_mul(&kb)
                } else if ka.nrows() == 1 {
                    kb * ka[(0, 0)]
                } else {
                    ka * kb[(0, 0)]
                }
            }
            KernelNode::DirectSum { a, b } => block_diagonal(&a.eval(z, w)?, &b.eval(z, w)?),
        })
    }
}

/// A validated kernel on a domain, with its rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKernelSpec", into = "RawKernelSpec")]
pub struct KernelSpec {
    domain: Domain,
    rank: usize,
    kernel: KernelNode,
}

/// JSON form of a [`KernelSpec`] before validation, so that syntax errors
/// and violated invariants can be reported separately.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawKernelSpec {
    pub domain: RawDomain,
    pub rank: usize,
    pub kernel: KernelNode,
}

impl TryFrom<RawKernelSpec> for KernelSpec {
    type Error = Error;
    fn try_from(j: RawKernelSpec) -> Result<Self> {
        let spec = KernelSpec::new(Domain::try_from(j.domain)?, j.kernel)?;
        if spec.rank != j.rank {
            return Err(Error::RankMismatch {
                context: "kernels",
                detail: format!("declared rank {} but the kernel has rank {}", j.rank, spec.rank),
            });
        }
        Ok(spec)
    }
}

impl From<KernelSpec> for RawKernelSpec {
    fn from(s: KernelSpec) -> Self {
        RawKernelSpec {
            domain: s.domain.into(),
            rank: s.rank,
            kernel: s.kernel,
        }
    }
}

impl KernelSpec {
    pub fn new(domain: Domain, kernel: KernelNode) -> Result<Self> {
        let rank = kernel.validate(&domain)?;
        Ok(KernelSpec { domain, rank, kernel })
    }

    pub fn weighted_disk(lambda: f64) -> Result<Self> {
        Self::new(Domain::unit_disk(), KernelNode::WeightedDisk { lambda })
    }

    /// `(1 − z w̄)⁻¹` on the unit disk.
    pub fn szego() -> Self {
        Self::weighted_disk(1.0).expect("valid builtin")
    }

    /// `(1 − z w̄)⁻²` on the unit disk.
    pub fn bergman() -> Self {
        Self::weighted_disk(2.0).expect("valid builtin")
    }

    pub fn polydisk(lambdas: Vec<f64>) -> Result<Self> {
        let domain = Domain::polydisk(lambdas.len())?;
        Self::new(domain, KernelNode::Polydisk { lambdas })
    }

    pub fn ball(dim: usize, lambda: f64) -> Result<Self> {
        Self::new(Domain::ball(dim)?, KernelNode::Ball { lambda })
    }

    pub fn constant(domain: Domain, matrix: CMatrix) -> Result<Self> {
        Self::new(domain, KernelNode::Constant { matrix })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn kernel(&self) -> &KernelNode {
        &self.kernel
    }

    /// Same kernel tree on another domain, revalidated.
    pub fn on_domain(&self, domain: Domain) -> Result<Self> {
        Self::new(domain, self.kernel.clone())
    }

    fn same_domain(&self, other: &KernelSpec) -> Result<()> {
        if self.domain == other.domain {
            Ok(())
        } else {
            Err(Error::DomainMismatch { context: "kernels" })
        }
    }

    /// `Ψ(z) K(z, w) Ψ(w)*`.
    pub fn conjugate(&self, psi: HoloMatrix) -> Result<Self> {
        Self::new(
            self.domain,
            KernelNode::Conjugate {
                psi,
                base: Box::new(self.kernel.clone()),
            },
        )
    }

    /// Rank-one shorthand for [`conjugate`](Self::conjugate) by a scalar
    /// multiplier.
    pub fn conjugate_scalar(&self, psi: HoloExpr) -> Result<Self> {
        self.conjugate(HoloMatrix::scalar(psi))
    }

    fn combine(
        &self,
        other: &KernelSpec,
        f: impl FnOnce(Box<KernelNode>, Box<KernelNode>) -> KernelNode,
    ) -> Result<Self> {
        self.same_domain(other)?;
        Self::new(
            self.domain,
            f(Box::new(self.kernel.clone()), Box::new(other.kernel.clone())),
        )
    }

    pub fn sum(&self, other: &KernelSpec) -> Result<Self> {
        self.combine(other, |a, b| KernelNode::Sum { a, b })
    }

    pub fn product(&self, other: &KernelSpec) -> Result<Self> {
        self.combine(other, |a, b| KernelNode::Product { a, b })
    }

    pub fn direct_sum(&self, other: &KernelSpec) -> Result<Self> {
        self.combine(other, |a, b| KernelNode::DirectSum { a, b })
    }

    /// `K(z, w)`; both points must lie in the margin-shrunk domain.
    pub fn eval(&self, z: &ComplexPoint, w: &ComplexPoint) -> Result<CMatrix> {
        self.domain.check(z)?;
        self.domain.check(w)?;
        self.kernel.eval(z, w)
    }

    /// `K(z, z)`.
    pub fn diagonal(&self, z: &ComplexPoint) -> Result<CMatrix> {
        self.eval(z, z)
    }

    /// Block Gram matrix with block `(j, k) = K(w_j, w_k)`.
    pub fn block_gram(&self, points: &[ComplexPoint]) -> Result<CMatrix> {
        let m = self.rank;
        let n = points.len();
        for p in points {
            self.domain.check(p)?;
        }
        let mut gram = CMatrix::zeros(n * m, n * m);
        for (j, wj) in points.iter().enumerate() {
            for (k, wk) in points.iter().enumerate() {
                let block = self.kernel.eval(wj, wk)?;
                gram.view_mut((j * m, k * m), (m, m)).copy_from(&block);
            }
        }
        Ok(gram)
    }
}

pub fn kernel_eval(spec: &KernelSpec, z: &ComplexPoint, w: &ComplexPoint) -> Result<CMatrix> {
    spec.eval(z, w)
}

/// `‖K(z, w) − K(w, z)*‖_F`.
pub fn hermitian_symmetry_residual(spec: &KernelSpec, z: &ComplexPoint, w: &ComplexPoint) -> Result<f64> {
    let kzw = spec.eval(z, w)?;
    let kwz = spec.eval(w, z)?;
    Ok(frobenius(&(kzw - kwz.adjoint())))
}

/// Smallest eigenvalue of the block Gram matrix `[K(w_j, w_k)]` over
/// `points`. Nonnegative (up to rounding) values certify positivity of the
/// kernel at this resolution.
pub fn psd_check(spec: &KernelSpec, points: &[ComplexPoint]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::invalid("kernels", "psd_check needs at least one point"));
    }
    for j in 0..points.len() {
        for k in j + 1..points.len() {
            if points[j] == points[k] {
                return Err(Error::DuplicatePoints { first: j, second: k });
            }
        }
    }
    let gram = spec.block_gram(points)?;
    Ok(hermitian_eigenvalues(&gram)[0])
}

/// Diagonal matrix with the given real entries.
pub fn real_diagonal(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| Complex64::new(v, 0.0)),
    ))
}
