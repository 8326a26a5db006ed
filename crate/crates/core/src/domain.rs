use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holomorphic::ComplexPoint;

pub const DEFAULT_MARGIN: f64 = 0.05;

/// Points per complex variable in the validation net of [`Domain::closed_net`].
pub const NET_POINTS_PER_VARIABLE: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Disk,
    Polydisk,
    Ball,
}

/// Bounded starlike domain about the origin: the unit disk, the unit
/// polydisk or the unit ball of ℂⁿ. Points whose norm (sup-norm for the disk
/// and polydisk, Euclidean for the ball) exceeds `1 − margin` are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDomain", into = "RawDomain")]
pub struct Domain {
    kind: DomainKind,
    dim: usize,
    margin: f64,
}

/// JSON form of a [`Domain`] before validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDomain {
    pub kind: DomainKind,
    pub dim: usize,
    #[serde(default = "default_margin")]
    pub margin: f64,
}

fn default_margin() -> f64 {
    DEFAULT_MARGIN
}

impl TryFrom<RawDomain> for Domain {
    type Error = Error;
    fn try_from(j: RawDomain) -> Result<Self> {
        Domain::new(j.kind, j.dim, j.margin)
    }
}

impl From<Domain> for RawDomain {
    fn from(d: Domain) -> Self {
        RawDomain {
            kind: d.kind,
            dim: d.dim,
            margin: d.margin,
        }
    }
}

impl Domain {
    pub fn new(kind: DomainKind, dim: usize, margin: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("kernels", "domain dimension must be at least 1"));
        }
        if kind == DomainKind::Disk && dim != 1 {
            return Err(Error::invalid(
                "kernels",
                "the disk is one-dimensional; use polydisk or ball",
            ));
        }
        if !(margin > 0.0 && margin < 1.0) {
            return Err(Error::invalid("kernels", format!("margin {} outside (0, 1)", margin)));
        }
        Ok(Domain { kind, dim, margin })
    }

    pub fn unit_disk() -> Self {
        Domain {
            kind: DomainKind::Disk,
            dim: 1,
            margin: DEFAULT_MARGIN,
        }
    }

    pub fn polydisk(dim: usize) -> Result<Self> {
        Self::new(DomainKind::Polydisk, dim, DEFAULT_MARGIN)
    }

    pub fn ball(dim: usize) -> Result<Self> {
        Self::new(DomainKind::Ball, dim, DEFAULT_MARGIN)
    }

    pub fn with_margin(self, margin: f64) -> Result<Self> {
        Self::new(self.kind, self.dim, margin)
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// Largest admissible norm, `1 − margin`.
    pub fn radius(&self) -> f64 {
        1.0 - self.margin
    }

    pub fn norm(&self, z: &ComplexPoint) -> f64 {
        match self.kind {
            DomainKind::Disk | DomainKind::Polydisk => z.norm_inf(),
            DomainKind::Ball => z.norm_2(),
        }
    }

    pub fn contains(&self, z: &ComplexPoint) -> bool {
        z.dim() == self.dim && self.norm(z) <= self.radius()
    }

    pub fn check(&self, z: &ComplexPoint) -> Result<()> {
        if z.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: z.dim(),
            });
        }
        if !self.contains(z) {
            return Err(Error::PointOutsideDomain {
                at: z.to_string(),
                margin: self.margin,
            });
        }
        Ok(())
    }

    /// Radius within which every point of the closed domain has a point of
    /// [`closed_net`](Self::closed_net): 1.5 times the side of the cube of
    /// volume (domain volume / net size).
    pub fn net_covering_radius(&self) -> f64 {
        let n = self.dim as i32;
        let count = match self.dim {
            1 => NET_POINTS_PER_VARIABLE - NET_POINTS_PER_VARIABLE / 5,
            _ => NET_POINTS_PER_VARIABLE * self.dim,
        } as f64;
        let volume = match self.kind {
            DomainKind::Ball => PI.powi(n) / (1..=self.dim).product::<usize>() as f64,
            _ => PI.powi(n),
        };
        1.5 * (volume / count).powf(1.0 / (2 * self.dim) as f64)
    }

    /// Deterministic net of the *closed* domain (boundary included), used to
    /// certify that denominators and determinants do not vanish.
    ///
    /// One variable: a sunflower spiral over the disk plus an even ring on the
    /// unit circle. Several variables: seeded random points, half of each
    /// coordinate's draws pinned to the boundary torus or sphere.
    pub fn closed_net(&self) -> Vec<ComplexPoint> {
        let total = NET_POINTS_PER_VARIABLE * self.dim;
        if self.dim == 1 {
            let ring = total / 5;
            let inner = total - ring;
            let mut pts = spiral(1.0, inner);
            pts.extend((0..ring).map(|k| {
                let t = 2.0 * PI * k as f64 / ring as f64;
                ComplexPoint::scalar(Complex64::from_polar(1.0, t))
            }));
            return pts;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x6e65_7473);
        (0..total)
            .map(|k| {
                let on_boundary = k % 2 == 0;
                let coords: Vec<Complex64> = match self.kind {
                    DomainKind::Ball => {
                        let raw: Vec<Complex64> = (0..self.dim)
                            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                            .collect();
                        let n = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
                        let r = if on_boundary {
                            1.0
                        } else {
                            rng.gen::<f64>().powf(1.0 / (2 * self.dim) as f64)
                        };
                        raw.into_iter().map(|c| c * (r / n)).collect()
                    }
                    _ => (0..self.dim)
                        .map(|_| {
                            let r = if on_boundary && rng.gen_bool(0.5) {
                                1.0
                            } else {
                                rng.gen::<f64>().sqrt()
                            };
                            Complex64::from_polar(r, 2.0 * PI * rng.gen::<f64>())
                        })
                        .collect(),
                };
                ComplexPoint::new(coords).expect("finite net point")
            })
            .collect()
    }
}

/// Vogel sunflower spiral of `count` points in the closed disk of radius
/// `radius`; the first point is the origin.
pub(crate) fn spiral(radius: f64, count: usize) -> Vec<ComplexPoint> {
    let golden = PI * (3.0 - 5f64.sqrt());
    let denom = (count.max(2) - 1) as f64;
    (0..count)
        .map(|k| {
            let r = radius * (k as f64 / denom).sqrt();
            ComplexPoint::scalar(Complex64::from_polar(r, golden * k as f64))
        })
        .collect()
}
