//! Finite-rank Hilbert modules given by matrix-valued reproducing kernels.
//!
//! * [`kernels`]: kernel specs, combinators and validity checks.
//! * [`localization`]: Grammians and the modulus of the canonical map.
//! * [`curvature`]: curvature forms by finite differences.
//! * [`equivalence`]: equivalence verdicts for rank-one kernels.
//! * [`oracle`]: finite sampled models.
//! * [`mapanalysis`]: rank profiles and singular sets of multipliers.
//! * [`suite`]: the check suite behind `qfhm check`.
//!
//! The guide in `book/` is compiled into doctests below.

pub mod builtin;
pub mod cjson;
pub mod curvature;
pub mod domain;
pub mod equivalence;
pub mod error;
pub mod grid;
pub mod holomorphic;
pub mod kernels;
pub mod linalg;
pub mod localization;
pub mod mapanalysis;
pub mod oracle;
pub mod suite;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/localization.md")]
    mod localization {}
    #[doc = include_str!("../../../book/src/curvature.md")]
    mod curvature {}
    #[doc = include_str!("../../../book/src/equivalence.md")]
    mod equivalence {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/mapanalysis.md")]
    mod mapanalysis {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
