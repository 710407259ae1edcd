//! Coefficient nonnegativity of `ε ↦ ∫_{K+εB} |s|^{2q}`, the mixed
//! coefficient of four planar bodies, and monotonicity scans.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{chebyshev_nodes, monomial_exponents, monomial_value, scaled_pseudo_inverse};
use crate::geom::{Polytope, PolytopeSpec};
use crate::linalg::factorial;
use crate::random::{
    nested_inner, random_centered_segment, random_offset_polytope, random_origin_polytope, random_symmetric_polytope,
    random_zonotope, rng_for, BodyClass,
};
use crate::report::{ExperimentReport, Violation};
use crate::valuation::{steiner_by_fit, steiner_coefficients, Descriptor};

/// Absolute tolerance for sign verdicts on unit-scale bodies.
pub const SIGN_TOL: f64 = 1e-9;

/// Largest number of archived counterexamples per report.
const ARCHIVE_LIMIT: usize = 20;

/// Coefficients of `((b+ε)^{2q+1} + (a+ε)^{2q+1}) / (2q+1)`, the expansion for
/// the interval `[-a, b]`.
pub fn interval_moment_expansion(q: u32, a: f64, b: f64) -> Vec<f64> {
    let n = 2 * q as usize + 1;
    (0..=n)
        .map(|k| crate::linalg::binomial(n, k) * (a.powi((n - k) as i32) + b.powi((n - k) as i32)) / n as f64)
        .collect()
}

fn random_vertex_count<R: Rng + ?Sized>(d: usize, rng: &mut R) -> usize {
    d + 1 + rng.random_range(0..6)
}

/// Nonnegativity of the ε-coefficients of `∫_{K+εB} |s|^{2q}` on random
/// polytopes containing the origin.
///
/// A control arm draws the same number of bodies missing the origin and
/// records how often a coefficient turns negative there, without a
/// verdict. In `d = 1` every expansion is also compared with the binomial
/// closed form (detail `closed_form_error`).
pub fn nonneg_scan(q: u32, d: usize, trials: usize, seed: u64) -> Result<ExperimentReport> {
    if !(1..=3).contains(&d) {
        return Err(Error::UnsupportedDimension(d, "nonnegativity scan (1 to 3)"));
    }
    if trials == 0 {
        return Err(Error::InsufficientSamples("no trials".into()));
    }
    let desc = Descriptor::moment(q);
    let mut report = ExperimentReport::new(format!("nonnegativity q={q} d={d}"), seed, trials);
    let mut closed_form_error = 0.0f64;
    let mut control_violations = 0usize;
    let mut worst = 0.0f64;
    for t in 0..trials {
        let mut rng = rng_for(seed, t as u64);
        let n = random_vertex_count(d, &mut rng);
        let body = random_origin_polytope(d, n, &mut rng);
        let e = steiner_coefficients(&desc, &body)?;
        let min = e.coeffs.iter().copied().fold(f64::INFINITY, f64::min);
        report.estimates.push(min);
        worst = worst.max(-min);
        if d == 1 {
            let (lo, hi) = (-body.support(&[-1.0]), body.support(&[1.0]));
            let exact = interval_moment_expansion(q, -lo, hi);
            for (k, c) in exact.iter().enumerate() {
                closed_form_error = closed_form_error.max((e.coeff(k) - c).abs() / c.abs().max(1.0));
            }
        }
        if min < -SIGN_TOL && confirmed_negative(&desc, &body)? && report.violations.len() < ARCHIVE_LIMIT {
            report.violations.push(Violation {
                trial: t,
                bodies: vec![body.spec()],
                values: e.coeffs.clone(),
                note: "negative coefficient on a body containing the origin".into(),
            });
        }

        let mut rng = rng_for(seed ^ 0x5a5a_5a5a_5a5a_5a5a, t as u64);
        let n = random_vertex_count(d, &mut rng);
        let control = random_offset_polytope(d, n, &mut rng);
        let c = steiner_coefficients(&desc, &control)?;
        if c.coeffs.iter().any(|v| *v < -SIGN_TOL) {
            control_violations += 1;
        }
    }
    report.residual = worst;
    report.threshold = SIGN_TOL;
    report.pass = report.violations.is_empty() && closed_form_error <= 1e-12;
    report.details.insert("control_trials".into(), trials as f64);
    report.details.insert("control_violations".into(), control_violations as f64);
    if d == 1 {
        report.details.insert("closed_form_error".into(), closed_form_error);
    }
    Ok(report)
}

/// Second opinion from the fitted expansion.
fn confirmed_negative(desc: &Descriptor, body: &Polytope) -> Result<bool> {
    let fit = steiner_by_fit(desc, body)?;
    Ok(fit.poly.coeffs.iter().any(|c| *c < -SIGN_TOL))
}

/// Coefficient `P(K₁, K₂, K₃, K₄)` of `∫_{Σ λᵢKᵢ} |s|² ds` and its
/// diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedCoefficientReport {
    pub bodies: Vec<PolytopeSpec>,
    /// Symmetric coefficient: the `λ₁λ₂λ₃λ₄` coefficient over `4!`.
    pub coefficient: f64,
    /// `sin(α + β) / 3` form, when all four bodies are centered segments.
    pub closed_form: Option<f64>,
    /// The four-vector identity evaluated on the segment directions.
    pub identity_residual: Option<f64>,
    pub fit_residual: f64,
    /// Fitted coefficients of the degree-4 monomials `λ^e`.
    pub coefficients: Vec<(Vec<u32>, f64)>,
    /// Per-coefficient verdict `c ≥ −1e-9`.
    pub nonnegative: Vec<bool>,
}

impl MixedCoefficientReport {
    pub fn all_nonnegative(&self) -> bool {
        self.nonnegative.iter().all(|b| *b)
    }

    /// `|P − closed form|`, when the closed form applies.
    pub fn closed_form_error(&self) -> Option<f64> {
        self.closed_form.map(|c| (c - self.coefficient).abs())
    }
}

fn wedge(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn inner(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// `⟨u₁,u₄⟩ u₂∧u₃ − ⟨u₂,u₄⟩ u₁∧u₃ − ⟨u₁,u₃⟩ u₂∧u₄ + ⟨u₂,u₃⟩ u₁∧u₄`, which
/// vanishes for all plane vectors.
pub fn four_vector_identity(u: &[[f64; 2]; 4]) -> f64 {
    let [u1, u2, u3, u4] = u;
    inner(u1, u4) * wedge(u2, u3) - inner(u2, u4) * wedge(u1, u3) - inner(u1, u3) * wedge(u2, u4)
        + inner(u2, u3) * wedge(u1, u4)
}

/// `P` for the segments `[−uᵢ, uᵢ]`: the directions are flipped into the
/// upper half-plane, sorted by angle, and then
/// `3P = ⟨u₃,u₄⟩ u₁∧u₂ + ⟨u₁,u₂⟩ u₃∧u₄`.
///
/// ```
/// use rotval::inequalities::segment_mixed_coefficient;
/// let u = [0.0f64, 30.0, 60.0, 90.0].map(|a| [a.to_radians().cos(), a.to_radians().sin()]);
/// let p = segment_mixed_coefficient(&u);
/// assert!((p - 3f64.sqrt() / 6.0).abs() < 1e-15);
/// ```
pub fn segment_mixed_coefficient(u: &[[f64; 2]; 4]) -> f64 {
    let mut v: Vec<([f64; 2], f64)> = u
        .iter()
        .map(|&w| {
            let th = w[1].atan2(w[0]);
            if th < 0.0 || th >= std::f64::consts::PI {
                let f = [-w[0], -w[1]];
                (f, f[1].atan2(f[0]))
            } else {
                (w, th)
            }
        })
        .collect();
    v.sort_by(|a, b| a.1.total_cmp(&b.1));
    let [u1, u2, u3, u4] = [v[0].0, v[1].0, v[2].0, v[3].0];
    (inner(&u3, &u4) * wedge(&u1, &u2) + inner(&u1, &u2) * wedge(&u3, &u4)) / 3.0
}

/// Half-direction `u` of a segment `[−u, u]`, if `p` is one.
fn centered_segment(p: &Polytope) -> Option<[f64; 2]> {
    if p.intrinsic_dim() != 1 || p.vertices().len() != 2 {
        return None;
    }
    let (a, b) = (&p.vertices()[0], &p.vertices()[1]);
    let scale = a.iter().chain(b).fold(0.0f64, |m, x| m.max(x.abs()));
    if (a[0] + b[0]).abs() > 1e-12 * scale || (a[1] + b[1]).abs() > 1e-12 * scale {
        return None;
    }
    Some([b[0], b[1]])
}

/// A planar body as a start vertex (lowest, then leftmost) and its
/// counterclockwise edge vectors tagged with their angle in `[0, 2π)`.
struct EdgeChain {
    start: [f64; 2],
    edges: Vec<([f64; 2], f64)>,
}

impl EdgeChain {
    fn new(p: &Polytope) -> Self {
        let v = p.vertices();
        let ring: Vec<[f64; 2]> = match p.intrinsic_dim() {
            0 => vec![[v[0][0], v[0][1]]],
            1 => v.iter().map(|x| [x[0], x[1]]).collect(),
            _ => crate::geom::convex_hull_2d(v, 1e-14 * p.circumradius())
                .into_iter()
                .map(|i| [v[i][0], v[i][1]])
                .collect(),
        };
        let s = (0..ring.len())
            .min_by(|&a, &b| ring[a][1].total_cmp(&ring[b][1]).then(ring[a][0].total_cmp(&ring[b][0])))
            .unwrap_or(0);
        let n = ring.len();
        let edges = if n < 2 {
            vec![]
        } else {
            (0..n)
                .map(|i| {
                    let (a, b) = (ring[(s + i) % n], ring[(s + i + 1) % n]);
                    let e = [b[0] - a[0], b[1] - a[1]];
                    let th = e[1].atan2(e[0]);
                    (e, if th < 0.0 { th + std::f64::consts::TAU } else { th })
                })
                .collect()
        };
        EdgeChain { start: ring[s], edges }
    }
}

/// `∫_{Σ λᵢKᵢ} |s|²` for planar bodies, by merging edge sequences.
fn planar_sum_moment(chains: &[EdgeChain], lambda: &[f64]) -> f64 {
    let mut start = [0.0; 2];
    let mut edges: Vec<([f64; 2], f64)> = Vec::new();
    for (c, &l) in chains.iter().zip(lambda) {
        start[0] += l * c.start[0];
        start[1] += l * c.start[1];
        if l != 0.0 {
            edges.extend(c.edges.iter().map(|(e, th)| ([l * e[0], l * e[1]], *th)));
        }
    }
    edges.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut total = 0.0;
    let mut p = start;
    for (e, _) in edges {
        let q = [p[0] + e[0], p[1] + e[1]];
        let cross = p[0] * q[1] - q[0] * p[1];
        total += cross * (p[0] * p[0] + p[0] * q[0] + q[0] * q[0] + p[1] * p[1] + p[1] * q[1] + q[1] * q[1]);
        p = q;
    }
    total / 12.0
}

/// The `5⁴` Chebyshev grid of `[0, 1]⁴` and the pseudo-inverse of its
/// design matrix for all monomials of degree at most 4.
struct MixedFit {
    grid: Vec<Vec<f64>>,
    exps: Vec<Vec<u32>>,
    design: DMatrix<f64>,
    pinv: DMatrix<f64>,
}

fn mixed_fit() -> &'static MixedFit {
    static FIT: OnceLock<MixedFit> = OnceLock::new();
    FIT.get_or_init(|| {
        let axis = chebyshev_nodes(5, 0.0, 1.0);
        let mut grid = Vec::with_capacity(625);
        for &a in &axis {
            for &b in &axis {
                for &c in &axis {
                    for &d in &axis {
                        grid.push(vec![a, b, c, d]);
                    }
                }
            }
        }
        let exps = monomial_exponents(4, 4);
        let design = DMatrix::from_fn(grid.len(), exps.len(), |i, j| monomial_value(&grid[i], &exps[j]));
        let scale: Vec<f64> = (0..exps.len()).map(|j| design.column(j).norm()).collect();
        let mut m = design.clone();
        for (j, s) in scale.iter().enumerate() {
            m.column_mut(j).scale_mut(1.0 / s);
        }
        let mut pinv = scaled_pseudo_inverse(&m).expect("the grid is unisolvent for degree 4");
        for (j, s) in scale.iter().enumerate() {
            pinv.row_mut(j).scale_mut(1.0 / s);
        }
        MixedFit { grid, exps, design, pinv }
    })
}

/// Extracts `P(K₁, …, K₄)` from a total-degree-4 fit of
/// `λ ↦ ∫_{Σ λᵢKᵢ} |s|²` on the `5⁴` Chebyshev grid of `[0, 1]⁴`.
pub fn mixed_moment(bodies: &[Polytope; 4]) -> Result<MixedCoefficientReport> {
    if let Some(b) = bodies.iter().find(|b| b.dim() != 2) {
        return Err(Error::UnsupportedDimension(b.dim(), "mixed moment coefficient (plane only)"));
    }
    let fit = mixed_fit();
    let chains: Vec<EdgeChain> = bodies.iter().map(EdgeChain::new).collect();
    let values: Vec<f64> = fit.grid.iter().map(|l| planar_sum_moment(&chains, l)).collect();
    let y = nalgebra::DVector::from_vec(values.clone());
    let coeffs = &fit.pinv * &y;
    let residual = (&fit.design * &coeffs - &y).norm();
    let vmax = values.iter().fold(f64::MIN_POSITIVE, |m, v| m.max(v.abs()));
    let fit_residual = residual / (fit.grid.len() as f64).sqrt() / vmax;
    if fit_residual > 1e-8 {
        return Err(Error::ResidualTooLarge {
            residual: fit_residual,
            threshold: 1e-8,
            context: "degree-4 fit of the mixed moment polynomial".into(),
        });
    }
    let exps = fit.exps.clone();
    let coefficients: Vec<(Vec<u32>, f64)> = exps
        .into_iter()
        .zip(coeffs.iter().copied())
        .filter(|(e, _)| e.iter().sum::<u32>() == 4)
        .collect();
    let coefficient = coefficients
        .iter()
        .find(|(e, _)| e.iter().all(|&k| k == 1))
        .map(|(_, c)| c / factorial(4))
        .expect("λ₁λ₂λ₃λ₄ is a degree-4 monomial");
    let nonnegative = coefficients.iter().map(|(_, c)| *c >= -SIGN_TOL).collect();
    let segments: Option<Vec<[f64; 2]>> = bodies.iter().map(centered_segment).collect();
    let (closed_form, identity_residual) = match segments {
        Some(s) => {
            let u = [s[0], s[1], s[2], s[3]];
            (Some(segment_mixed_coefficient(&u)), Some(four_vector_identity(&u)))
        }
        None => (None, None),
    };
    Ok(MixedCoefficientReport {
        bodies: bodies.iter().map(Polytope::spec).collect(),
        coefficient,
        closed_form,
        identity_residual,
        fit_residual,
        coefficients,
        nonnegative,
    })
}

/// Random unit segments: the grid-extracted `P` against the closed form.
/// Residual is the largest error; threshold `1e-8`.
pub fn segment_scan(quadruples: usize, seed: u64) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("segment mixed coefficient", seed, quadruples);
    let mut worst = 0.0f64;
    let mut identity = 0.0f64;
    for t in 0..quadruples {
        let mut rng = rng_for(seed, t as u64);
        let bodies: [Polytope; 4] = std::array::from_fn(|_| random_centered_segment(2, 1.0, &mut rng));
        let r = mixed_moment(&bodies)?;
        let err = r.closed_form_error().expect("segments");
        worst = worst.max(err);
        identity = identity.max(r.identity_residual.unwrap_or(0.0).abs());
        report.estimates.push(r.coefficient);
        if err > 1e-8 && report.violations.len() < ARCHIVE_LIMIT {
            report.violations.push(Violation {
                trial: t,
                bodies: r.bodies.clone(),
                values: vec![r.coefficient, r.closed_form.unwrap_or(f64::NAN)],
                note: "grid coefficient differs from the closed form".into(),
            });
        }
    }
    report.residual = worst;
    report.threshold = 1e-8;
    report.pass = worst <= 1e-8 && identity <= 1e-12;
    report.details.insert("identity_residual".into(), identity);
    Ok(report)
}

/// Random centered zonotopes (sums of 2 to `max_segments` segments, so
/// that no coefficient vanishes identically): every degree-4 coefficient of
/// the mixed moment polynomial must be nonnegative.
pub fn zonotope_scan(tuples: usize, max_segments: usize, seed: u64) -> Result<ExperimentReport> {
    if max_segments == 0 {
        return Err(Error::InvalidArgument("zonotopes need at least one segment".into()));
    }
    let mut report = ExperimentReport::new("zonotope mixed coefficients", seed, tuples);
    let mut worst = 0.0f64;
    for t in 0..tuples {
        let mut rng = rng_for(seed, t as u64);
        let bodies: [Polytope; 4] = std::array::from_fn(|_| {
            let m = rng.random_range(max_segments.min(2)..=max_segments);
            random_zonotope(2, m, 0.5, &mut rng)
        });
        let r = mixed_moment(&bodies)?;
        let min = r.coefficients.iter().map(|(_, c)| *c).fold(f64::INFINITY, f64::min);
        worst = worst.max(-min);
        report.estimates.push(min);
        if !r.all_nonnegative() && report.violations.len() < ARCHIVE_LIMIT {
            report.violations.push(Violation {
                trial: t,
                bodies: r.bodies.clone(),
                values: r.coefficients.iter().map(|(_, c)| *c).collect(),
                note: "negative mixed coefficient".into(),
            });
        }
    }
    report.residual = worst;
    report.threshold = SIGN_TOL;
    report.pass = report.violations.is_empty();
    Ok(report)
}

/// `K₂ ⊆ K₁` up to `tol`, comparing support values in the facet normals of
/// `K₁`.
pub fn is_nested(inner: &Polytope, outer: &Polytope, tol: f64) -> bool {
    outer
        .facets()
        .iter()
        .all(|f| inner.support(&f.normal) <= f.offset + tol)
}

/// `d^j/dε^j|₀ ∫_{K+εB} |s|^{2q}` for a nested pair, outer body first.
pub fn monotonicity_pair(j: usize, q: u32, outer: &Polytope, inner: &Polytope) -> Result<(f64, f64)> {
    let tol = 1e-12 * outer.circumradius().max(1.0);
    if !is_nested(inner, outer, tol) {
        return Err(Error::InvalidArgument("the inner body is not contained in the outer one".into()));
    }
    let desc = Descriptor::moment(q);
    Ok((
        steiner_coefficients(&desc, outer)?.derivative(j),
        steiner_coefficients(&desc, inner)?.derivative(j),
    ))
}

/// Searches nested pairs `K₂ ⊂ K₁` of the given class for
/// `φ(K₁) < φ(K₂) − 1e-9`, `φ` the `j`-th ε-derivative of
/// `∫_{K+εB} |s|^{2q}`.
///
/// Inner bodies pull the vertices of `K₁` toward the origin, so both bodies
/// contain it. Only `j = 1` on origin-containing bodies carries a verdict
/// (detail `asserted`); other runs report what they find.
pub fn monotonicity_scan(j: usize, q: u32, d: usize, class: BodyClass, trials: usize, seed: u64) -> Result<ExperimentReport> {
    if !(1..=2).contains(&d) {
        return Err(Error::UnsupportedDimension(d, "monotonicity scan (1 or 2)"));
    }
    if trials == 0 {
        return Err(Error::InsufficientSamples("no trials".into()));
    }
    let asserted = j == 1 && class == BodyClass::OriginContaining;
    let mut report = ExperimentReport::new(format!("monotonicity j={j} q={q} d={d} {class:?}"), seed, trials);
    let origin = vec![0.0; d];
    let mut found = 0usize;
    let mut worst = 0.0f64;
    for t in 0..trials {
        let mut rng = rng_for(seed, t as u64);
        let n = random_vertex_count(d, &mut rng);
        let (outer, symmetric) = match class {
            BodyClass::OriginContaining => (random_origin_polytope(d, n, &mut rng), false),
            BodyClass::Symmetric => (random_symmetric_polytope(d, n / 2 + 1, &mut rng), true),
        };
        let inner = nested_inner(&outer, &origin, symmetric, &mut rng)?;
        let (a, b) = monotonicity_pair(j, q, &outer, &inner)?;
        report.estimates.push(a - b);
        worst = worst.max(b - a);
        if a < b - SIGN_TOL && confirmed_violation(j, q, &outer, &inner)? {
            found += 1;
            if report.violations.len() < ARCHIVE_LIMIT {
                report.violations.push(Violation {
                    trial: t,
                    bodies: vec![outer.spec(), inner.spec()],
                    values: vec![a, b],
                    note: "outer value below inner value".into(),
                });
            }
        }
    }
    report.residual = worst;
    report.threshold = SIGN_TOL;
    report.pass = !asserted || found == 0;
    report.details.insert("asserted".into(), if asserted { 1.0 } else { 0.0 });
    report.details.insert("violations_found".into(), found as f64);
    Ok(report)
}

fn confirmed_violation(j: usize, q: u32, outer: &Polytope, inner: &Polytope) -> Result<bool> {
    let desc = Descriptor::moment(q);
    let a = steiner_by_fit(&desc, outer)?.poly.derivative(j);
    let b = steiner_by_fit(&desc, inner)?.poly.derivative(j);
    Ok(a < b - SIGN_TOL)
}
