//! Random bodies, cuts, and transforms for the randomized checks.
//!
//! All generators draw from a caller-supplied RNG; [`rng_for`] derives an
//! independent ChaCha stream for each `(seed, index)` pair.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geom::{build_polytope, minkowski_sum, Hyperplane, Polytope};
use crate::linalg::{scale, uniform_in_ball, uniform_on_sphere, Point};

/// Independent generator for item `index` of a run seeded with `seed`.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Body classes used by the scans.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BodyClass {
    /// Bodies containing the origin.
    OriginContaining,
    /// Bodies symmetric about the origin.
    Symmetric,
}

/// Hull of `n` uniform points in the unit ball, redrawn until
/// full-dimensional.
pub fn random_polytope<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Polytope {
    loop {
        let pts: Vec<Point> = (0..n.max(d + 1)).map(|_| uniform_in_ball(d, rng)).collect();
        if let Ok(p) = build_polytope(&pts, d) {
            if p.is_full_dimensional() && p.volume() > 1e-3 {
                return p;
            }
        }
    }
}

/// Random polytope with the origin in its interior (distance at least
/// `1e-3` from the boundary).
pub fn random_origin_polytope<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Polytope {
    loop {
        let p = random_polytope(d, n, rng);
        if p.facets().iter().all(|f| f.offset > 1e-3) {
            return p;
        }
    }
}

/// Random polytope whose closure misses the origin: a random body
/// translated by a vector longer than its circumradius.
pub fn random_offset_polytope<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Polytope {
    let p = random_polytope(d, n, rng);
    let shift = 1.0 + 1.5 * rng.random::<f64>();
    p.translate(&scale(&uniform_on_sphere(d, rng), shift))
}

/// Hull of `±v_1, ..., ±v_m`.
pub fn random_symmetric_polytope<R: Rng + ?Sized>(d: usize, m: usize, rng: &mut R) -> Polytope {
    loop {
        let mut pts = Vec::new();
        for _ in 0..m.max(d) {
            let v = uniform_in_ball(d, rng);
            pts.push(scale(&v, -1.0));
            pts.push(v);
        }
        if let Ok(p) = build_polytope(&pts, d) {
            if p.is_full_dimensional() && p.volume() > 1e-3 {
                return p;
            }
        }
    }
}

/// Centered segment `[-u, u]` with `u` uniform in the ball of radius `r`.
pub fn random_centered_segment<R: Rng + ?Sized>(d: usize, r: f64, rng: &mut R) -> Polytope {
    let u = scale(&uniform_in_ball(d, rng), r);
    Polytope::segment(scale(&u, -1.0), u).expect("segment")
}

/// Sum of `m` random centered segments, each of half-length at most `r`.
pub fn random_zonotope<R: Rng + ?Sized>(d: usize, m: usize, r: f64, rng: &mut R) -> Polytope {
    let mut z = random_centered_segment(d, r, rng);
    for _ in 1..m {
        z = minkowski_sum(&z, &random_centered_segment(d, r, rng)).expect("equal dimensions");
    }
    z
}

/// Hyperplane with uniform normal and offset uniform strictly between the
/// support values of `p`, so that it cuts the interior.
pub fn random_cut<R: Rng + ?Sized>(p: &Polytope, rng: &mut R) -> Hyperplane {
    let n = uniform_on_sphere(p.dim(), rng);
    let hi = p.support(&n);
    let lo = -p.support(&scale(&n, -1.0));
    let t = 0.05 + 0.9 * rng.random::<f64>();
    Hyperplane::new(n, lo + t * (hi - lo)).expect("unit normal")
}

/// `K₂ ⊂ K₁` obtained by pulling each vertex of `K₁` toward `anchor` by a
/// factor in `[0.3, 0.95]`. With `symmetric`, the vertices `v` and `-v`
/// share a factor so that symmetric bodies stay symmetric.
pub fn nested_inner<R: Rng + ?Sized>(outer: &Polytope, anchor: &[f64], symmetric: bool, rng: &mut R) -> Result<Polytope> {
    let v = outer.vertices();
    let mut factors: Vec<Option<f64>> = vec![None; v.len()];
    for i in 0..v.len() {
        if factors[i].is_some() {
            continue;
        }
        let f = 0.3 + 0.65 * rng.random::<f64>();
        factors[i] = Some(f);
        if symmetric {
            if let Some(j) = (0..v.len()).find(|&j| {
                factors[j].is_none() && v[j].iter().zip(&v[i]).all(|(a, b)| (a + b).abs() < 1e-12)
            }) {
                factors[j] = Some(f);
            }
        }
    }
    let pts: Vec<Point> = v
        .iter()
        .zip(&factors)
        .map(|(x, f)| {
            let f = f.unwrap();
            x.iter().zip(anchor).map(|(a, c)| c + f * (a - c)).collect()
        })
        .collect();
    build_polytope(&pts, outer.dim())
}
