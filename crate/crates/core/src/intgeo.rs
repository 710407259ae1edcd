//! Monte Carlo over affine and linear Grassmannians: Crofton-type slice
//! integrals and their projection counterparts.
//!
//! For a plane `E` and the section `M = K ∩ E` (or the projection `K | E`)
//! the inner quantity is the ε-expansion of `∫_{M_ε} |s|² dm(s)`, where
//! `M_ε` is the parallel body taken inside `E`. In intrinsic coordinates
//! `s = z + V t` with `z ⟂ V`, the integrand is `|z|² + |t|²`, so the
//! expansion has degree at most `k + 2` and is available in closed form
//! for intervals and polygons.

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::least_squares;
use crate::geom::{build_polytope, convex_hull_2d, Polytope, SectionMode};
use crate::linalg::{dot, factorial, orthonormalize, rank, sub, unit_ball_volume, uniform_in_ball, Point};
use crate::random::rng_for;
use crate::report::ExperimentReport;
use crate::valuation::parallel::Kernel;
use crate::valuation::{kernel_expansion, quermassintegrals, steiner_coefficients, Descriptor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaneMode {
    /// Affine planes meeting the ball of radius `R`.
    Affine,
    /// Planes through the origin.
    Linear,
}

/// One random `k`-plane `{z + V t}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneSample {
    pub frame: Vec<Point>,
    pub basepoint: Point,
    pub weight: f64,
    pub seed: u64,
    pub index: u64,
}

/// Plane number `index` of the stream `seed`.
pub fn sample_plane(d: usize, k: usize, r: f64, mode: PlaneMode, seed: u64, index: u64) -> PlaneSample {
    let mut rng = rng_for(seed, index);
    let basis = loop {
        let g: Vec<Point> = (0..d)
            .map(|_| (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        if let Some(b) = orthonormalize(&g) {
            break b;
        }
    };
    let (frame, complement) = basis.split_at(k);
    let (basepoint, weight) = match mode {
        PlaneMode::Linear => (vec![0.0; d], 1.0),
        PlaneMode::Affine => {
            let c = uniform_in_ball(d - k, &mut rng);
            let mut z = vec![0.0; d];
            for (ci, w) in c.iter().zip(complement) {
                for (zi, wi) in z.iter_mut().zip(w) {
                    *zi += r * ci * wi;
                }
            }
            (z, unit_ball_volume(d - k) * r.powi((d - k) as i32))
        }
    };
    PlaneSample {
        frame: frame.to_vec(),
        basepoint,
        weight,
        seed,
        index,
    }
}

/// `n` independent planes. Linear mode draws Haar frames; affine mode adds
/// a basepoint uniform in the radius-`R` ball of the orthogonal complement
/// and weights every plane by that ball's volume.
///
/// ```
/// use rotval::intgeo::{sample_planes, PlaneMode};
/// use rotval::linalg::{dot, orthonormality_defect};
/// let planes = sample_planes(3, 2, 1.5, 100, 7, PlaneMode::Affine).unwrap();
/// for e in &planes {
///     assert!(orthonormality_defect(&e.frame) <= 1e-12);
///     assert!(e.frame.iter().all(|v| dot(v, &e.basepoint).abs() <= 1e-12));
/// }
/// ```
pub fn sample_planes(d: usize, k: usize, r: f64, n: usize, seed: u64, mode: PlaneMode) -> Result<Vec<PlaneSample>> {
    check_k(d, k)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("sampling radius must be positive, got {r}")));
    }
    Ok((0..n as u64).into_par_iter().map(|i| sample_plane(d, k, r, mode, seed, i)).collect())
}

fn check_k(d: usize, k: usize) -> Result<()> {
    if k == 0 || k >= d {
        return Err(Error::InvalidArgument(format!("plane dimension {k} must lie in 1..={}", d.saturating_sub(1))));
    }
    Ok(())
}

/// Coefficients of `∫_{[α−ε, β+ε]} (a + t²) dt`.
pub fn interval_expansion(a: f64, lo: f64, hi: f64) -> [f64; 4] {
    [
        a * (hi - lo) + (hi.powi(3) - lo.powi(3)) / 3.0,
        2.0 * a + lo * lo + hi * hi,
        hi - lo,
        2.0 / 3.0,
    ]
}

/// Coefficients of `∫_{M + εB} (a + |t|²) dt` for a convex polygon `M`
/// given by its vertices in counterclockwise order.
pub fn polygon_expansion(a: f64, v: &[[f64; 2]]) -> [f64; 5] {
    let n = v.len();
    let mut c = [0.0; 5];
    let normal = |i: usize| {
        let (p, q) = (v[i], v[(i + 1) % n]);
        let (ex, ey) = (q[0] - p[0], q[1] - p[1]);
        let len = ex.hypot(ey);
        ([ey / len, -ex / len], len)
    };
    let mut prev = normal(n - 1).0;
    for i in 0..n {
        let (p, q) = (v[i], v[(i + 1) % n]);
        let cross = p[0] * q[1] - q[0] * p[1];
        c[0] += a * cross / 2.0
            + cross * (p[0] * p[0] + p[0] * q[0] + q[0] * q[0] + p[1] * p[1] + p[1] * q[1] + q[1] * q[1]) / 12.0;
        let (nv, len) = normal(i);
        let pp = p[0] * p[0] + p[1] * p[1];
        c[1] += len * (a + (pp + p[0] * q[0] + p[1] * q[1] + q[0] * q[0] + q[1] * q[1]) / 3.0);
        c[2] += len * (p[0] * nv[0] + p[1] * nv[1]);
        c[3] += len / 3.0;
        // vertex p sits between the previous edge and this one
        let turn = (prev[0] * nv[1] - prev[1] * nv[0]).atan2(prev[0] * nv[0] + prev[1] * nv[1]);
        c[2] += turn * (a + pp) / 2.0;
        c[3] += 2.0 / 3.0 * (p[0] * (nv[1] - prev[1]) + p[1] * (prev[0] - nv[0]));
        c[4] += turn / 4.0;
        prev = nv;
    }
    c
}

/// ε-coefficients (length `k + 3`) of `∫_{M_ε} |s|² dm(s)` for the section
/// (slice or projection) of `p` by `plane`, the parallel body taken inside
/// the plane.
pub fn section_expansion(p: &Polytope, plane: &PlaneSample, mode: SectionMode) -> Result<Vec<f64>> {
    let d = p.dim();
    let k = plane.frame.len();
    check_k(d, k)?;
    let z = &plane.basepoint;
    let shift = match mode {
        SectionMode::Slice => dot(z, z),
        SectionMode::Project => 0.0,
    };
    let local = |x: &[f64]| -> Point {
        let c = sub(x, z);
        plane.frame.iter().map(|v| dot(v, &c)).collect()
    };
    let mut out = vec![0.0; k + 3];
    match (k, mode) {
        (1, SectionMode::Slice) => {
            let v = &plane.frame[0];
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for f in p.facets() {
                let a = dot(&f.normal, v);
                let b = f.offset - dot(&f.normal, z);
                if a.abs() <= 1e-14 {
                    if b < 0.0 {
                        return Ok(out);
                    }
                } else if a > 0.0 {
                    hi = hi.min(b / a);
                } else {
                    lo = lo.max(b / a);
                }
            }
            if lo <= hi {
                out.copy_from_slice(&interval_expansion(shift, lo, hi));
            }
        }
        (1, SectionMode::Project) => {
            let t: Vec<f64> = p.vertices().iter().map(|x| local(x)[0]).collect();
            let lo = t.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            out.copy_from_slice(&interval_expansion(shift, lo, hi));
        }
        (2, _) => {
            let pts = match mode {
                SectionMode::Project => p.vertices().iter().map(|x| local(x)).collect(),
                SectionMode::Slice => plane_slice_points(p, plane, &local),
            };
            if pts.is_empty() {
                return Ok(out);
            }
            let hull = convex_hull_2d(&pts, 1e-12 * p.circumradius().max(1e-300));
            if hull.len() >= 3 {
                let v: Vec<[f64; 2]> = hull.iter().map(|&i| [pts[i][0], pts[i][1]]).collect();
                out.copy_from_slice(&polygon_expansion(shift, &v));
            } else {
                // a segment or a point: leave it to the general engine
                let m = build_polytope(&pts, 2)?;
                let e = kernel_expansion(&Kernel::Moment { m: 1, shift }, &m, k + 2)?;
                for (j, c) in out.iter_mut().enumerate() {
                    *c = e.coeff(j);
                }
            }
        }
        _ => return Err(Error::UnsupportedDimension(k, "sections of dimension 1 or 2")),
    }
    Ok(out)
}

/// Intersection of a 3-polytope with a plane, in plane coordinates.
fn plane_slice_points(p: &Polytope, plane: &PlaneSample, local: &dyn Fn(&[f64]) -> Point) -> Vec<Point> {
    let w = crate::linalg::cross3(&plane.frame[0], &plane.frame[1]);
    let c = dot(&w, &plane.basepoint);
    let tol = p.tol();
    let v = p.vertices();
    let sigma: Vec<f64> = v.iter().map(|x| dot(&w, x) - c).collect();
    let mut pts = Vec::new();
    for &(a, b) in p.edges() {
        let (sa, sb) = (sigma[a], sigma[b]);
        if (sa < -tol && sb > tol) || (sa > tol && sb < -tol) {
            let t = sa / (sa - sb);
            let x: Point = v[a].iter().zip(&v[b]).map(|(xa, xb)| xa + t * (xb - xa)).collect();
            pts.push(local(&x));
        }
    }
    for (x, s) in v.iter().zip(&sigma) {
        if s.abs() <= tol {
            pts.push(local(x));
        }
    }
    pts
}

/// Per-body Monte Carlo means and standard errors of the weighted
/// `j`-th derivatives, `j = 0..=jmax`.
#[derive(Clone, Debug)]
struct LhsTable {
    mean: Vec<Vec<f64>>,
    se: Vec<Vec<f64>>,
    /// Largest absolute per-plane value, per body and `j`.
    max_abs: Vec<Vec<f64>>,
}

const CHUNK: usize = 4096;

fn lhs_table(family: &[Polytope], k: usize, n: usize, seed: u64, mode: PlaneMode, jmax: usize) -> Result<LhsTable> {
    let d = family[0].dim();
    let r = family.iter().map(|b| b.max_norm()).fold(0.0, f64::max) * (1.0 + 1e-9);
    let section_mode = match mode {
        PlaneMode::Affine => SectionMode::Slice,
        PlaneMode::Linear => SectionMode::Project,
    };
    let jn = jmax + 1;
    let mut table = LhsTable {
        mean: vec![],
        se: vec![],
        max_abs: vec![],
    };
    for (b, body) in family.iter().enumerate() {
        let body_seed = rng_for(seed, b as u64).next_u64();
        let chunks = n.div_ceil(CHUNK);
        let partial = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = vec![[0.0f64; 3]; jn];
                for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                    let plane = sample_plane(d, k, r.max(1e-12), mode, body_seed, i as u64);
                    let e = section_expansion(body, &plane, section_mode)?;
                    for (j, a) in acc.iter_mut().enumerate() {
                        let v = plane.weight * factorial(j) * e.get(j).copied().unwrap_or(0.0);
                        a[0] += v;
                        a[1] += v * v;
                        a[2] = a[2].max(v.abs());
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut sums = vec![[0.0f64; 3]; jn];
        for acc in partial {
            for (s, a) in sums.iter_mut().zip(acc) {
                s[0] += a[0];
                s[1] += a[1];
                s[2] = s[2].max(a[2]);
            }
        }
        let nf = n as f64;
        table.mean.push(sums.iter().map(|s| s[0] / nf).collect());
        table.se.push(
            sums.iter()
                .map(|s| {
                    let m = s[0] / nf;
                    ((s[1] / nf - m * m).max(0.0) / (nf - 1.0).max(1.0)).sqrt()
                })
                .collect(),
        );
        table.max_abs.push(sums.iter().map(|s| s[2]).collect());
    }
    Ok(table)
}

fn check_family(family: &[Polytope], k: usize, n: usize) -> Result<usize> {
    let d = family.first().ok_or(Error::EmptyInput)?.dim();
    if !(2..=3).contains(&d) {
        return Err(Error::UnsupportedDimension(d, "plane experiments (2 or 3)"));
    }
    check_k(d, k)?;
    if let Some(b) = family.iter().find(|b| b.dim() != d) {
        return Err(Error::DimensionMismatch(d, b.dim()));
    }
    if let Some(b) = family.iter().find(|b| !b.is_full_dimensional()) {
        return Err(Error::LowerDimensional {
            dim: d,
            intrinsic: b.intrinsic_dim(),
        });
    }
    if n < 2 {
        return Err(Error::InsufficientSamples(format!("{n} planes")));
    }
    Ok(d)
}

/// Weighted regression of `y` (standard errors `se`) onto the feature
/// columns; passes when `‖A c − y‖ ≤ 3 √(Σ se²)`.
fn regress(
    mut report: ExperimentReport,
    y: Vec<f64>,
    se: Vec<f64>,
    features: Vec<(String, Vec<f64>)>,
) -> Result<ExperimentReport> {
    let vmax = features
        .iter()
        .flat_map(|(_, c)| c.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    // Zero columns are out-of-range derivatives; dependent columns (for
    // instance several constants) would make the design singular.
    let mut kept: Vec<(String, Vec<f64>)> = Vec::new();
    let mut dropped = 0;
    for (name, col) in features {
        if !col.iter().any(|v| v.abs() > 1e-12 * vmax) {
            continue;
        }
        let mut cols: Vec<Vec<f64>> = kept.iter().map(|(_, c)| c.clone()).collect();
        cols.push(col.clone());
        if rank(&cols, 1e-9) == kept.len() + 1 {
            kept.push((name, col));
        } else {
            dropped += 1;
        }
    }
    let features = kept;
    report.details.insert("dependent_features_dropped".into(), dropped as f64);
    let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let threshold = 3.0 * se.iter().map(|s| s * s).sum::<f64>().sqrt() + 1e-12 * ynorm;
    if !features.is_empty() {
        if y.len() <= features.len() {
            return Err(Error::InsufficientSamples(format!(
                "{} bodies for {} features",
                y.len(),
                features.len()
            )));
        }
        let design: Vec<Vec<f64>> = (0..y.len())
            .map(|b| features.iter().map(|(_, c)| c[b]).collect())
            .collect();
        // Deterministic estimates (zero standard error) get a floor relative to
        // the values, so exact rows dominate without overflowing the weights.
        let ymax = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let floor = (se.iter().fold(0.0f64, |m, s| m.max(*s)) * 1e-6).max(1e-12 * ymax).max(f64::MIN_POSITIVE.sqrt());
        let weights: Vec<f64> = se.iter().map(|s| 1.0 / s.max(floor).powi(2)).collect();
        let ls = least_squares(&design, &y, Some(&weights))?;
        report.coefficient_stderr = (0..ls.coeffs.len()).map(|i| ls.covariance[i][i].sqrt()).collect();
        report.coefficients = ls.coeffs;
        report.residuals = ls.residuals;
    } else {
        report.residuals = y.iter().map(|v| -v).collect();
    }
    report.features = features.into_iter().map(|(n, _)| n).collect();
    report.residual = report.residuals.iter().map(|r| r * r).sum::<f64>().sqrt();
    report.threshold = threshold;
    report.pass = report.residual <= threshold;
    report.estimates = y;
    report.stderr = se;
    Ok(report)
}

/// A `j` beyond the degree of the inner polynomial: every per-plane value
/// must vanish exactly.
fn exact_zero(mut report: ExperimentReport, table: &LhsTable, j: usize) -> ExperimentReport {
    report.estimates = table.mean.iter().map(|m| m[j]).collect();
    report.stderr = table.se.iter().map(|s| s[j]).collect();
    report.residual = table.max_abs.iter().map(|m| m[j]).fold(0.0, f64::max);
    report.threshold = 0.0;
    report.pass = report.residual == 0.0;
    report
}

fn sweep(
    family: &[Polytope],
    k: usize,
    js: &[usize],
    n: usize,
    seed: u64,
    mode: PlaneMode,
    features: &dyn Fn(usize, usize) -> Result<Vec<(String, Vec<f64>)>>,
) -> Result<Vec<ExperimentReport>> {
    let d = check_family(family, k, n)?;
    let jmax = js.iter().copied().max().unwrap_or(0).max(k + 3);
    let table = lhs_table(family, k, n, seed, mode, jmax)?;
    let label = match mode {
        PlaneMode::Affine => "crofton",
        PlaneMode::Linear => "projection",
    };
    js.iter()
        .map(|&j| {
            let base = ExperimentReport::new(format!("{label} d={d} k={k} j={j}"), seed, n)
                .with_detail("d", d as f64)
                .with_detail("k", k as f64)
                .with_detail("j", j as f64)
                .with_detail("bodies", family.len() as f64);
            if j > k + 2 {
                return Ok(exact_zero(base, &table, j));
            }
            let y = table.mean.iter().map(|m| m[j]).collect();
            let se = table.se.iter().map(|s| s[j]).collect();
            regress(base, y, se, features(d, j)?)
        })
        .collect()
}

/// Per-body feature values computed once per sweep.
struct BodyFeatures {
    moment: Vec<crate::valuation::EpsilonPolynomial>,
    xi20: Vec<crate::valuation::EpsilonPolynomial>,
    xi11: Vec<crate::valuation::EpsilonPolynomial>,
    quermass: Vec<Vec<f64>>,
}

impl BodyFeatures {
    fn new(family: &[Polytope], projections: bool) -> Result<Self> {
        let exp = |desc: Descriptor| -> Result<Vec<_>> {
            family.iter().map(|b| steiner_coefficients(&desc, b)).collect()
        };
        Ok(BodyFeatures {
            moment: if projections { vec![] } else { exp(Descriptor::moment(1))? },
            xi20: if projections { exp(Descriptor::xi(2, 0))? } else { vec![] },
            xi11: if projections { exp(Descriptor::xi(1, 1))? } else { vec![] },
            quermass: family.iter().map(quermassintegrals).collect::<Result<_>>()?,
        })
    }

    fn w(&self, i: usize) -> (String, Vec<f64>) {
        (format!("W_{i}"), self.quermass.iter().map(|w| w[i]).collect())
    }
}

/// Crofton experiment for every `j` in `0..=k+3`, sharing one plane sample
/// per body.
///
/// The regression features are `d^j/dε^j ∫_{K+εB} |s|²` for `j ≤ 1`, that
/// together with `W_{j−2}` for `2 ≤ j ≤ k`, and `W_{j−2}` alone for
/// `j = k+1, k+2`. Beyond `k + 2` the estimate must vanish identically.
pub fn crofton_sweep(family: &[Polytope], k: usize, n: usize, seed: u64) -> Result<Vec<ExperimentReport>> {
    let js: Vec<usize> = (0..=k + 3).collect();
    crofton_at(family, k, &js, n, seed)
}

fn crofton_at(family: &[Polytope], k: usize, js: &[usize], n: usize, seed: u64) -> Result<Vec<ExperimentReport>> {
    check_family(family, k, n)?;
    let f = BodyFeatures::new(family, false)?;
    let features = |_d: usize, j: usize| -> Result<Vec<(String, Vec<f64>)>> {
        let moment = (
            format!("moment(1)^({j})"),
            f.moment.iter().map(|e| e.derivative(j)).collect(),
        );
        Ok(match j {
            0 | 1 => vec![moment],
            j if j <= k => vec![moment, f.w(j - 2)],
            j if j <= k + 2 => vec![f.w(j - 2)],
            _ => vec![],
        })
    };
    sweep(family, k, js, n, seed, PlaneMode::Affine, &features)
}

/// Crofton experiment for a single `j`.
///
/// ```
/// use rotval::geom::Polytope;
/// use rotval::intgeo::crofton_experiment;
/// let family: Vec<Polytope> = (3..8).map(|m| Polytope::regular_polygon(m, 0.5 + 0.05 * m as f64, 0.1)).collect();
/// let r = crofton_experiment(&family, 1, 4, 200, 1).unwrap();
/// assert!(r.pass && r.residual == 0.0);
/// ```
pub fn crofton_experiment(family: &[Polytope], k: usize, j: usize, n: usize, seed: u64) -> Result<ExperimentReport> {
    Ok(crofton_at(family, k, &[j], n, seed)?.remove(0))
}

/// Projection experiment for every `j` in `0..=k+3`.
///
/// The features are `ξ_{2,0}^{(d−1+j−k)}`, `ξ_{1,1}^{(d+j−k)}` and
/// `W_{d−2+j−k}`, each omitted when its index is negative or beyond the
/// degree of the corresponding ε-polynomial.
pub fn projection_sweep(family: &[Polytope], k: usize, n: usize, seed: u64) -> Result<Vec<ExperimentReport>> {
    let js: Vec<usize> = (0..=k + 3).collect();
    projection_at(family, k, &js, n, seed)
}

fn projection_at(family: &[Polytope], k: usize, js: &[usize], n: usize, seed: u64) -> Result<Vec<ExperimentReport>> {
    check_family(family, k, n)?;
    let f = BodyFeatures::new(family, true)?;
    let features = |d: usize, j: usize| -> Result<Vec<(String, Vec<f64>)>> {
        let index = |offset: usize| (d + j).checked_sub(k + offset);
        let mut out = Vec::new();
        if let Some(i) = index(1).filter(|&i| i <= Descriptor::xi(2, 0).epsilon_degree_bound(d)) {
            out.push((format!("xi(2,0)^({i})"), f.xi20.iter().map(|e| e.derivative(i)).collect()));
        }
        if let Some(i) = index(0).filter(|&i| i <= Descriptor::xi(1, 1).epsilon_degree_bound(d)) {
            out.push((format!("xi(1,1)^({i})"), f.xi11.iter().map(|e| e.derivative(i)).collect()));
        }
        if let Some(i) = index(2).filter(|&i| i <= d) {
            out.push(f.w(i));
        }
        Ok(out)
    };
    sweep(family, k, js, n, seed, PlaneMode::Linear, &features)
}

/// Projection experiment for a single `j`.
pub fn projection_experiment(family: &[Polytope], k: usize, j: usize, n: usize, seed: u64) -> Result<ExperimentReport> {
    Ok(projection_at(family, k, &[j], n, seed)?.remove(0))
}

/// Largest `|α₁ − α₂| / √(σ₁² + σ₂²)` over the fitted constants of two runs
/// of the same experiment. Runs are consistent when this is at most 3.
pub fn constant_discrepancy(a: &ExperimentReport, b: &ExperimentReport) -> Result<f64> {
    if a.features != b.features {
        return Err(Error::InvalidArgument(format!(
            "feature sets differ: {:?} vs {:?}",
            a.features, b.features
        )));
    }
    Ok(a.coefficients
        .iter()
        .zip(&b.coefficients)
        .zip(a.coefficient_stderr.iter().zip(&b.coefficient_stderr))
        .map(|((x, y), (s, t))| (x - y).abs() / (s * s + t * t).sqrt().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max))
}

/// Mean of `⟨v, e₁⟩²` over the first frame vector of `n` planes; `1/d` for
/// Haar frames.
pub fn frame_axis_moment(planes: &[PlaneSample]) -> (f64, f64) {
    let vals: Vec<f64> = planes.iter().map(|e| e.frame[0][0].powi(2)).collect();
    let n = vals.len() as f64;
    let m = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, (var / n).sqrt())
}
