use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cjson::Cx;
use crate::error::{Error, Result};

/// A point of ℂⁿ, n ≥ 1, with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Cx>", into = "Vec<Cx>")]
pub struct ComplexPoint(Vec<Complex64>);

impl ComplexPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("holomorphic", "a point needs at least one coordinate"));
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("holomorphic", "point coordinates must be finite"));
        }
        Ok(ComplexPoint(coords))
    }

    /// One-variable point. Panics on non-finite input.
    pub fn scalar(z: Complex64) -> Self {
        Self::new(vec![z]).expect("finite coordinate")
    }

    pub fn from_re_im(re: f64, im: f64) -> Self {
        Self::scalar(Complex64::new(re, im))
    }

    pub fn origin(dim: usize) -> Self {
        assert!(dim >= 1);
        ComplexPoint(vec![Complex64::new(0.0, 0.0); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn coord(&self, k: usize) -> Complex64 {
        self.0[k]
    }

    /// Copy of `self` with coordinate `k` moved by `delta`.
    pub fn shifted(&self, k: usize, delta: Complex64) -> Self {
        let mut c = self.0.clone();
        c[k] += delta;
        ComplexPoint(c)
    }

    pub fn scaled(&self, t: f64) -> Self {
        ComplexPoint(self.0.iter().map(|c| c * t).collect())
    }

    pub fn norm_2(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &ComplexPoint) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Real coordinates `(x₁, y₁, x₂, y₂, …)`.
    pub fn real_coords(&self) -> Vec<f64> {
        self.0.iter().flat_map(|c| [c.re, c.im]).collect()
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        ComplexPoint::scalar(z)
    }
}

impl From<f64> for ComplexPoint {
    fn from(x: f64) -> Self {
        ComplexPoint::from_re_im(x, 0.0)
    }
}

impl TryFrom<Vec<Cx>> for ComplexPoint {
    type Error = Error;

    fn try_from(v: Vec<Cx>) -> Result<Self> {
        ComplexPoint::new(v.into_iter().map(Complex64::from).collect())
    }
}

impl From<ComplexPoint> for Vec<Cx> {
    fn from(p: ComplexPoint) -> Self {
        p.0.into_iter().map(Cx::from).collect()
    }
}

impl fmt::Display for ComplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}{:+}i", c.re, c.im)?;
        }
        write!(f, ")")
    }
}
