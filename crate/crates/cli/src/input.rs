//! Reading kernel specs and multiplier files.

use serde::Deserialize;
use thiserror::Error;

use qfhm::domain::{Domain, RawDomain};
use qfhm::grid::random_points;
use qfhm::holomorphic::HoloMatrix;
use qfhm::kernels::{hermitian_symmetry_residual, KernelSpec, RawKernelSpec};

/// Pairs tested for `K(z,w) = K(w,z)*` when a spec is loaded.
pub const SPOT_CHECK_PAIRS: usize = 5;

/// Relative tolerance of the load-time Hermitian spot check.
pub const SPOT_CHECK_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error: {0}")]
    Validation(String),
}

impl From<serde_json::Error> for InputError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep the location separately.
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        InputError::Parse {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

impl From<qfhm::Error> for InputError {
    fn from(e: qfhm::Error) -> Self {
        InputError::Validation(e.to_string())
    }
}

/// Parses and validates a kernel spec. Besides the structural checks done
/// by [`KernelSpec`], `K(z,w) = K(w,z)*` is spot-checked on a few seeded
/// pairs of points.
pub fn parse_kernel_spec(text: &str) -> Result<KernelSpec, InputError> {
    let raw: RawKernelSpec = serde_json::from_str(text)?;
    let spec = KernelSpec::try_from(raw)?;
    let domain = spec.domain();
    let pts = random_points(domain, 2 * SPOT_CHECK_PAIRS, 0.9 * domain.radius(), 0x5eed);
    for pair in pts.chunks(2) {
        let r = hermitian_symmetry_residual(&spec, &pair[0], &pair[1])?;
        let scale = spec.eval(&pair[0], &pair[1])?.norm().max(1.0);
        if !(r <= SPOT_CHECK_TOL * scale) {
            return Err(InputError::Validation(format!(
                "kernels: K(z,w) = K(w,z)* fails at z = {}, w = {} (residual {:.3e})",
                pair[0], pair[1], r
            )));
        }
    }
    Ok(spec)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    domain: RawDomain,
    map: HoloMatrix,
}

/// A square multiplier together with the domain it is profiled on.
#[derive(Debug, Clone)]
pub struct MapSpec {
    pub domain: Domain,
    pub map: HoloMatrix,
}

/// Parses `{"domain": {...}, "map": [[expr, ...], ...]}`.
pub fn parse_map_spec(text: &str) -> Result<MapSpec, InputError> {
    let raw: RawMap = serde_json::from_str(text)?;
    let domain = Domain::try_from(raw.domain)?;
    if !raw.map.is_square() {
        return Err(InputError::Validation(format!(
            "mapanalysis: map is {}x{}, not square",
            raw.map.rows(),
            raw.map.cols()
        )));
    }
    if raw.map.dim() != domain.dim() {
        return Err(InputError::Validation(format!(
            "mapanalysis: map uses {} variables, domain has {}",
            raw.map.dim(),
            domain.dim()
        )));
    }
    Ok(MapSpec { domain, map: raw.map })
}
