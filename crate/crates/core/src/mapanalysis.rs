//! Pointwise rank of a holomorphic matrix multiplier and its singular sets
//! `Σ_k = {z : rank Ψ(z) = k}`, `k < m`.
//!
//! For a nondegenerate Ψ these sets are analytic subvarieties, hence thin:
//! on a grid they should never contain a full neighbourhood of a point.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holomorphic::{ComplexPoint, HoloMatrix};
use crate::linalg::singular_values;

pub const DEFAULT_RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankProfile {
    pub grid: Vec<ComplexPoint>,
    pub ranks: Vec<usize>,
    pub smallest_singular: Vec<f64>,
    pub tol: f64,
    pub m: usize,
}

/// Numerical rank: singular values above `tol · max(σ_max, 1)`.
pub fn numerical_rank(sigma: &[f64], tol: f64) -> usize {
    let cutoff = tol * sigma.first().copied().unwrap_or(0.0).max(1.0);
    sigma.iter().filter(|&&s| s > cutoff).count()
}

pub fn rank_profile(psi: &HoloMatrix, grid: &[ComplexPoint], tol: f64) -> Result<RankProfile> {
    if !psi.is_square() {
        return Err(Error::invalid(
            "mapanalysis",
            format!("Ψ is {}x{}, not square", psi.rows(), psi.cols()),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("mapanalysis", "rank tolerance must be positive"));
    }
    let sv = grid
        .par_iter()
        .map(|z| Ok(singular_values(&psi.eval(z)?)))
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(RankProfile {
        grid: grid.to_vec(),
        ranks: sv.iter().map(|s| numerical_rank(s, tol)).collect(),
        smallest_singular: sv.iter().map(|s| s.last().copied().unwrap_or(0.0)).collect(),
        tol,
        m: psi.rows(),
    })
}

/// One singular set `Σ_k` on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSet {
    pub rank: usize,
    pub points: Vec<ComplexPoint>,
    pub count: usize,
    /// Componentwise `(min, max)` of the real coordinates.
    pub bbox: Option<(Vec<f64>, Vec<f64>)>,
    /// Some member has a full grid neighbourhood inside the set.
    pub has_interior: bool,
}

fn bbox(points: &[ComplexPoint]) -> Option<(Vec<f64>, Vec<f64>)> {
    let first = points.first()?.real_coords();
    let init = (first.clone(), first);
    Some(points.iter().skip(1).fold(init, |(mut lo, mut hi), p| {
        for (k, x) in p.real_coords().into_iter().enumerate() {
            lo[k] = lo[k].min(x);
            hi[k] = hi[k].max(x);
        }
        (lo, hi)
    }))
}

/// A point is interior when its grid neighbours (points within 1.5× its
/// nearest-neighbour distance) number at least `2·(real dimension)` and all
/// share its rank.
fn has_interior(profile: &RankProfile, rank: usize) -> bool {
    let grid = &profile.grid;
    if grid.len() < 2 {
        return false;
    }
    let real_dim = 2 * grid[0].dim();
    (0..grid.len()).filter(|&i| profile.ranks[i] == rank).any(|i| {
        let dists: Vec<f64> = grid.iter().map(|q| grid[i].distance(q)).collect();
        let nearest = dists
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &d)| d)
            .fold(f64::INFINITY, f64::min);
        let neighbours: Vec<usize> = (0..grid.len())
            .filter(|&j| j != i && dists[j] <= 1.5 * nearest)
            .collect();
        neighbours.len() >= 2 * real_dim && neighbours.iter().all(|&j| profile.ranks[j] == rank)
    })
}

/// `Σ_k` for every `k < m` (empty sets included), keyed by `k`.
pub fn singular_sets(profile: &RankProfile) -> BTreeMap<usize, SingularSet> {
    (0..profile.m)
        .map(|k| {
            let points: Vec<ComplexPoint> = profile
                .grid
                .iter()
                .zip(&profile.ranks)
                .filter(|(_, &r)| r == k)
                .map(|(p, _)| p.clone())
                .collect();
            let set = SingularSet {
                rank: k,
                count: points.len(),
                bbox: bbox(&points),
                has_interior: !points.is_empty() && has_interior(profile, k),
                points,
            };
            (k, set)
        })
        .collect()
}

/// Total fraction of grid points lying in some `Σ_k`, `k < m`.
pub fn singular_fraction(profile: &RankProfile) -> f64 {
    if profile.grid.is_empty() {
        return 0.0;
    }
    profile.ranks.iter().filter(|&&r| r < profile.m).count() as f64 / profile.grid.len() as f64
}
