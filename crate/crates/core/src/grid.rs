//! Evaluation grids. All grids are deterministic and never touch the
//! boundary: rectangular grids use cell centres, so odd sizes contain 0.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{spiral, Domain, DomainKind};
use crate::error::{Error, Result};
use crate::holomorphic::ComplexPoint;

fn centres(count: usize, radius: f64) -> Vec<f64> {
    // Written so that the middle centre of an odd grid is exactly 0.
    (0..count)
        .map(|k| radius * (2 * k as i64 + 1 - count as i64) as f64 / count as f64)
        .collect()
}

/// Cell-centre grid of `rows × cols` cells over `[−radius, radius]²` in each
/// variable, keeping the points of `domain` with domain norm ≤ `radius`.
/// Rows run along the imaginary axis; points are ordered row by row, then by
/// variable (last variable fastest).
pub fn cell_centers(domain: &Domain, rows: usize, cols: usize, radius: f64) -> Result<Vec<ComplexPoint>> {
    if rows == 0 || cols == 0 {
        return Err(Error::invalid("grid", "grid dimensions must be positive"));
    }
    if !(radius > 0.0) {
        return Err(Error::invalid("grid", "grid radius must be positive"));
    }
    let xs = centres(cols, radius);
    let ys = centres(rows, radius);
    let plane: Vec<Complex64> = ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| Complex64::new(x, y)))
        .collect();
    let mut points: Vec<Vec<Complex64>> = vec![Vec::new()];
    for _ in 0..domain.dim() {
        points = points
            .into_iter()
            .flat_map(|prefix| {
                plane.iter().map(move |&c| {
                    let mut p = prefix.clone();
                    p.push(c);
                    p
                })
            })
            .collect();
    }
    Ok(points
        .into_iter()
        .map(|c| ComplexPoint::new(c).expect("finite grid point"))
        .filter(|p| domain.contains(p) && domain.norm(p) <= radius)
        .collect())
}

/// [`cell_centers`] over the whole margin-shrunk domain.
pub fn domain_grid(domain: &Domain, rows: usize, cols: usize) -> Result<Vec<ComplexPoint>> {
    cell_centers(domain, rows, cols, domain.radius())
}

/// Sunflower spiral of `count` points in `|z| ≤ radius`, starting at 0.
pub fn spiral_grid(domain: &Domain, radius: f64, count: usize) -> Result<Vec<ComplexPoint>> {
    if domain.dim() != 1 {
        return Err(Error::invalid("grid", "spiral grids are one-dimensional"));
    }
    if radius > domain.radius() {
        return Err(Error::invalid(
            "grid",
            format!("radius {} exceeds the domain radius", radius),
        ));
    }
    Ok(spiral(radius, count))
}

/// `n × n` points of `[−half_width, half_width]²` including the corners.
pub fn square_lattice(n: usize, half_width: f64) -> Result<Vec<ComplexPoint>> {
    if n < 2 {
        return Err(Error::invalid("grid", "a lattice needs at least two points per side"));
    }
    let step = 2.0 * half_width / (n - 1) as f64;
    let ticks: Vec<f64> = (0..n).map(|k| -half_width + k as f64 * step).collect();
    Ok(ticks
        .iter()
        .flat_map(|&y| ticks.iter().map(move |&x| ComplexPoint::from_re_im(x, y)))
        .collect())
}

/// `count` seeded points uniformly distributed in the `radius`-dilate of the
/// domain's unit ball (disk, polydisk or ball).
pub fn random_points(domain: &Domain, count: usize, radius: f64, seed: u64) -> Vec<ComplexPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = domain.dim();
    (0..count)
        .map(|_| {
            let coords = match domain.kind() {
                DomainKind::Ball => loop {
                    let c: Vec<Complex64> = (0..n)
                        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect();
                    let norm2: f64 = c.iter().map(|v| v.norm_sqr()).sum();
                    if norm2 <= 1.0 {
                        break c.into_iter().map(|v| v * radius).collect::<Vec<_>>();
                    }
                },
                _ => (0..n)
                    .map(|_| {
                        let r = radius * rng.gen::<f64>().sqrt();
                        Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
                    })
                    .collect(),
            };
            ComplexPoint::new(coords).expect("finite random point")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_grids_contain_origin() {
        let d = Domain::unit_disk();
        for n in [21, 41, 81] {
            let g = cell_centers(&d, n, n, 0.8).unwrap();
            assert!(g.iter().any(|p| p.norm_2() == 0.0));
            assert!(g.iter().all(|p| p.norm_2() <= 0.8));
        }
        let g = domain_grid(&d, 4, 4).unwrap();
        assert!(g.iter().all(|p| p.norm_2() > 0.1));
    }

    #[test]
    fn polydisk_grid_is_a_product() {
        let d = Domain::polydisk(2).unwrap();
        let g = domain_grid(&d, 3, 3).unwrap();
        assert_eq!(g.len(), 81);
        assert!(g.contains(&ComplexPoint::origin(2)));
        let b = Domain::ball(2).unwrap();
        assert!(domain_grid(&b, 3, 3).unwrap().len() < 81);
    }

    #[test]
    fn lattice_and_spiral() {
        let l = square_lattice(5, 0.49).unwrap();
        assert_eq!(l.len(), 25);
        assert!(l.iter().all(|p| p.norm_2() <= 0.7));
        let s = spiral_grid(&Domain::unit_disk(), 0.8, 200).unwrap();
        assert_eq!(s.len(), 200);
        assert_eq!(s[0], ComplexPoint::origin(1));
        assert!(s.iter().all(|p| p.norm_2() <= 0.8 + 1e-12));
    }

    #[test]
    fn random_points_are_seeded() {
        let d = Domain::ball(2).unwrap();
        let a = random_points(&d, 10, 0.9, 7);
        assert_eq!(a, random_points(&d, 10, 0.9, 7));
        assert!(a.iter().all(|p| p.norm_2() <= 0.9));
    }
}
