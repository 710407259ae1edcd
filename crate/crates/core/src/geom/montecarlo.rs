//! Brute-force Monte Carlo integration, used as an independent oracle.
//!
//! Samples are drawn in fixed-size chunks, each with its own ChaCha stream
//! derived from `(seed, chunk index)`. Chunk sums are merged in index order,
//! so the result does not depend on the number of worker threads.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integrate::fix_normal;
use super::Polytope;
use crate::error::{Error, Result};
use crate::linalg::Point;
use crate::poly::MultiPoly;
use crate::random::rng_for;

const CHUNK: usize = 4096;

#[derive(Clone, Debug)]
pub enum McTarget {
    /// `∫_P f(x) dx`
    Interior(MultiPoly),
    /// `∫_{∂P} g(s, n) dσ`, `g` in the `2d` variables `(s, n)`.
    Boundary(MultiPoly),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
}

fn run_chunks<F>(n: usize, seed: u64, f: F) -> (f64, f64)
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng_for(seed, c as u64);
            let m = CHUNK.min(n - c * CHUNK);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..m {
                let y = f(&mut rng);
                s += y;
                s2 += y * y;
            }
            (s, s2)
        })
        .collect();
    partial
        .iter()
        .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d))
}

fn finish(sum: f64, sum2: f64, n: usize, measure: f64) -> McEstimate {
    let nf = n as f64;
    let mean = sum / nf;
    let var = (sum2 / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
    McEstimate {
        estimate: measure * mean,
        stderr: measure * (var / nf).sqrt(),
        samples: n,
    }
}

/// Uniform point in the simplex with the given vertices.
fn sample_simplex<R: Rng>(verts: &[&Point], rng: &mut R) -> Point {
    let m = verts.len();
    let mut w: Vec<f64> = (0..m).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    let d = verts[0].len();
    let mut x = vec![0.0; d];
    for (wi, v) in w.iter().zip(verts) {
        for k in 0..d {
            x[k] += wi * v[k];
        }
    }
    x
}

/// Monte Carlo estimate of an interior or boundary integral.
///
/// Interior targets use rejection sampling in the bounding box; boundary
/// targets pick a facet simplex with probability proportional to its
/// measure and a uniform point inside it.
pub fn monte_carlo_oracle(p: &Polytope, target: &McTarget, n: usize, seed: u64) -> Result<McEstimate> {
    if n < 100 {
        return Err(Error::InsufficientSamples(format!("need at least 100 samples, got {n}")));
    }
    if p.is_empty() {
        return Err(Error::EmptyBody);
    }
    let d = p.dim();
    match target {
        McTarget::Interior(f) => {
            if f.dim() != d {
                return Err(Error::DimensionMismatch(f.dim(), d));
            }
            if !p.is_full_dimensional() {
                return Ok(McEstimate {
                    estimate: 0.0,
                    stderr: 0.0,
                    samples: n,
                });
            }
            let mut lo = p.vertices()[0].clone();
            let mut hi = lo.clone();
            for v in p.vertices() {
                for k in 0..d {
                    lo[k] = lo[k].min(v[k]);
                    hi[k] = hi[k].max(v[k]);
                }
            }
            let boxvol: f64 = (0..d).map(|k| hi[k] - lo[k]).product();
            let (s, s2) = run_chunks(n, seed, |rng| {
                let x: Point = (0..d).map(|k| lo[k] + (hi[k] - lo[k]) * rng.random::<f64>()).collect();
                if p.contains(&x, 0.0) {
                    f.eval(&x)
                } else {
                    0.0
                }
            });
            Ok(finish(s, s2, n, boxvol))
        }
        McTarget::Boundary(g) => {
            if g.dim() != 2 * d {
                return Err(Error::DimensionMismatch(g.dim(), 2 * d));
            }
            if p.intrinsic_dim() + 1 < d {
                return Ok(McEstimate {
                    estimate: 0.0,
                    stderr: 0.0,
                    samples: n,
                });
            }
            let v = p.vertices();
            // (simplex vertices, integrand with the normal substituted)
            let mut pieces: Vec<(Vec<&Point>, MultiPoly, f64)> = Vec::new();
            let measure_of = |s: &[&Point]| {
                let edges: Vec<Point> = s[1..].iter().map(|x| crate::linalg::sub(x, s[0])).collect();
                crate::linalg::gram_volume(&edges) / crate::linalg::factorial(edges.len())
            };
            if p.intrinsic_dim() + 1 == d {
                let nrm = p.flat_normal().expect("flat normal");
                let neg: Point = nrm.iter().map(|x| -x).collect();
                let h = &fix_normal(g, &nrm) + &fix_normal(g, &neg);
                for s in p.triangulation() {
                    let pts: Vec<&Point> = s.iter().map(|&i| &v[i]).collect();
                    let m = measure_of(&pts);
                    pieces.push((pts, h.clone(), m));
                }
            } else {
                for f in p.facets() {
                    let h = fix_normal(g, &f.normal);
                    for s in &f.simplices {
                        let pts: Vec<&Point> = s.iter().map(|&i| &v[i]).collect();
                        let m = measure_of(&pts);
                        pieces.push((pts, h.clone(), m));
                    }
                }
            }
            let total: f64 = pieces.iter().map(|x| x.2).sum();
            let mut cdf = Vec::with_capacity(pieces.len());
            let mut acc = 0.0;
            for x in &pieces {
                acc += x.2 / total;
                cdf.push(acc);
            }
            let (s, s2) = run_chunks(n, seed, |rng| {
                let u: f64 = rng.random();
                let i = cdf.partition_point(|&c| c < u).min(pieces.len() - 1);
                let (pts, h, _) = &pieces[i];
                let x = sample_simplex(pts, rng);
                h.eval(&x)
            });
            Ok(finish(s, s2, n, total))
        }
    }
}
