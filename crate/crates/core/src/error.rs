use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Messages carry the originating module as a prefix so that a CLI user can
/// tell at a glance which stage rejected the input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("holomorphic: point has dimension {got}, expression expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("holomorphic: denominator vanishes at {at} (|den| = {modulus:.3e})")]
    PoleAtPoint { at: String, modulus: f64 },

    #[error("holomorphic: finite-difference step {step} leaves the domain at {at}")]
    StepTooLarge { step: f64, at: String },

    #[error("kernels: point {at} lies outside the domain (margin {margin})")]
    PointOutsideDomain { at: String, margin: f64 },

    #[error("{context}: rank mismatch ({detail})")]
    RankMismatch { context: &'static str, detail: String },

    #[error("{context}: domains differ")]
    DomainMismatch { context: &'static str },

    #[error("kernels: sample points {first} and {second} coincide")]
    DuplicatePoints { first: usize, second: usize },

    #[error("{context}: condition number {condition:.3e} exceeds {limit:.1e}")]
    IllConditioned {
        context: &'static str,
        condition: f64,
        limit: f64,
    },

    #[error("localization: generator values are not a basis (condition {condition:.3e})")]
    SingularBasis { condition: f64 },

    #[error("oracle: Gram matrix is not positive (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("oracle: models do not share samples and rank")]
    SampleMismatch,

    #[error("curvature: stencil of step {step:.1e} exits the domain at {at}")]
    StencilExitsDomain { step: f64, at: String },

    #[error("curvature: field is not strictly positive ({value:e}) at {at}")]
    NonPositiveField { value: f64, at: String },

    #[error("{context}: {message}")]
    Invalid { context: &'static str, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(context: &'static str, message: impl Into<String>) -> Self {
        Error::Invalid {
            context,
            message: message.into(),
        }
    }
}
