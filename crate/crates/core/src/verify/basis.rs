use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dims::Group;
use crate::error::{Error, Result};
use crate::fit::{least_squares, FitReport};
use crate::geom::Polytope;
use crate::linalg::{scale, uniform_in_ball, Point};
use crate::random::rng_for;
use crate::valuation::{evaluate, steiner_coefficients, Descriptor, EpsilonPolynomial};

/// A spanning valuation of the invariant polynomial valuations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisElement {
    /// `ξ_{p,q}^{(j)}`
    Xi { p: u32, q: u32, j: usize },
    /// `ψ_{p,q}` (plane only)
    Psi { p: u32, q: u32 },
    /// `∫_K |x|^{2m}`
    Moment { m: u32 },
    /// `d^j/dε^j|₀ ∫_{K+εB} |x|^{2m}`
    MomentDeriv { m: u32, j: usize },
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisElement::Xi { p, q, j } => write!(f, "xi({p},{q})^({j})"),
            BasisElement::Psi { p, q } => write!(f, "psi({p},{q})"),
            BasisElement::Moment { m } => write!(f, "moment({m})"),
            BasisElement::MomentDeriv { m, j } => write!(f, "moment({m})^({j})"),
        }
    }
}

impl BasisElement {
    /// The underlying valuation and the derivative order (0 for none).
    fn parts(&self) -> (Descriptor, usize) {
        match *self {
            BasisElement::Xi { p, q, j } => (Descriptor::xi(p, q), j),
            BasisElement::Psi { p, q } => (Descriptor::psi(p, q), 0),
            BasisElement::Moment { m } => (Descriptor::moment(m), 0),
            BasisElement::MomentDeriv { m, j } => (Descriptor::moment(m), j),
        }
    }

    pub fn evaluate(&self, k: &Polytope) -> Result<f64> {
        Ok(evaluate_elements(std::slice::from_ref(self), k)?[0])
    }
}

/// Values of several elements on one body, sharing ε-expansions.
pub fn evaluate_elements(els: &[BasisElement], k: &Polytope) -> Result<Vec<f64>> {
    let mut expansions: BTreeMap<Descriptor, EpsilonPolynomial> = BTreeMap::new();
    els.iter()
        .map(|el| {
            let (desc, j) = el.parts();
            if j == 0 {
                return evaluate(&desc, k);
            }
            if !expansions.contains_key(&desc) {
                expansions.insert(desc, steiner_coefficients(&desc, k)?);
            }
            Ok(expansions[&desc].derivative(j))
        })
        .collect()
}

/// Basis of the increment at level `ell`.
///
/// For `O`: `ξ_{p,q}^{(j)}` with `p ≥ 2`, `p + 2q = ℓ`, `j ≤ d − 2`, and for
/// even `ℓ` also `ξ_{1,ℓ/2}^{(j)}`, `j ≤ d`.
///
/// For `SO` (plane): `ψ_{0,0}, ψ_{1,0}` and the second derivative of
/// volume at level 0; for even `ℓ ≥ 2` all `ψ_{p,q}` with `p + q = ℓ`
/// together with the moment `m = ℓ/2` and its second derivative; for odd
/// `ℓ ≥ 3` the `ψ_{p,q}` with `p + q = ℓ`, `p ≥ 2`.
pub(crate) fn level_elements(d: usize, ell: u32, group: Group) -> Vec<BasisElement> {
    let mut out = Vec::new();
    match group {
        Group::O => {
            for p in (2..=ell).filter(|p| (ell - p) % 2 == 0) {
                for j in 0..=d - 2 {
                    out.push(BasisElement::Xi { p, q: (ell - p) / 2, j });
                }
            }
            if ell % 2 == 0 {
                for j in 0..=d {
                    out.push(BasisElement::Xi { p: 1, q: ell / 2, j });
                }
            }
        }
        Group::SO => match ell {
            0 => {
                out.push(BasisElement::Psi { p: 0, q: 0 });
                out.push(BasisElement::Psi { p: 1, q: 0 });
                out.push(BasisElement::MomentDeriv { m: 0, j: 2 });
            }
            1 => {}
            l if l % 2 == 0 => {
                for p in 0..=l {
                    out.push(BasisElement::Psi { p, q: l - p });
                }
                out.push(BasisElement::Moment { m: l / 2 });
                out.push(BasisElement::MomentDeriv { m: l / 2, j: 2 });
            }
            l => {
                for p in 2..=l {
                    out.push(BasisElement::Psi { p, q: l - p });
                }
            }
        },
    }
    out
}

/// Basis of all levels `0..=ell`.
pub fn basis_elements(d: usize, ell: u32, group: Group) -> Vec<BasisElement> {
    (0..=ell).flat_map(|l| level_elements(d, l, group)).collect()
}

/// Outcome of [`fit_in_basis`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisFit {
    pub elements: Vec<BasisElement>,
    pub report: FitReport,
}

/// Number of copies (the body and its translates) used per body.
pub const TRANSLATES_PER_BODY: usize = 4;

/// The bodies and their translates `K + x`, `x` uniform in the ball of
/// radius 2 (the first copy of each body is untranslated).
fn sample_copies(bodies: &[Polytope], d: usize, seed: u64) -> Vec<Polytope> {
    bodies
        .iter()
        .enumerate()
        .flat_map(|(i, b)| {
            let mut rng = rng_for(seed, i as u64);
            (0..TRANSLATES_PER_BODY)
                .map(|t| {
                    let x: Point = if t == 0 {
                        vec![0.0; d]
                    } else {
                        scale(&uniform_in_ball(d, &mut rng), 2.0)
                    };
                    b.translate(&x)
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn basis_design(d: usize, ell: u32, bodies: &[Polytope], group: Group, seed: u64) -> Result<(Vec<BasisElement>, Vec<Polytope>, Vec<Vec<f64>>)> {
    if group == Group::SO && d != 2 {
        return Err(Error::InvalidArgument("the SO basis is planar".into()));
    }
    if bodies.iter().any(|b| b.dim() != d) {
        return Err(Error::InvalidArgument(format!("all bodies must live in R^{d}")));
    }
    let elements = basis_elements(d, ell, group);
    let copies = sample_copies(bodies, d, seed);
    if copies.len() < 2 * elements.len() {
        return Err(Error::InsufficientSamples(format!(
            "{} samples for {} basis elements",
            copies.len(),
            elements.len()
        )));
    }
    let design = copies
        .par_iter()
        .map(|k| evaluate_elements(&elements, k))
        .collect::<Result<Vec<_>>>()?;
    Ok((elements, copies, design))
}

fn solve(name: String, elements: &[BasisElement], design: &[Vec<f64>], y: &[f64]) -> Result<FitReport> {
    let ls = least_squares(design, y, None)?;
    let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    Ok(FitReport::new(
        name,
        (design.len(), elements.len()),
        ls.coeffs,
        ls.residual_norm / ynorm,
        ls.condition,
        1e-6,
    ))
}

/// Least-squares expansion of `target` in the basis up to level `ell`,
/// sampled on each body and on translates `K + x` with `x` uniform in the
/// ball of radius 2.
pub fn fit_in_basis<F>(target: F, d: usize, ell: u32, bodies: &[Polytope], group: Group, seed: u64) -> Result<BasisFit>
where
    F: Fn(&Polytope) -> Result<f64> + Sync,
{
    let (elements, copies, design) = basis_design(d, ell, bodies, group, seed)?;
    let y = copies.par_iter().map(&target).collect::<Result<Vec<f64>>>()?;
    let report = solve(format!("basis fit, d={d}, level {ell}, {group:?}"), &elements, &design, &y)?;
    Ok(BasisFit { elements, report })
}

/// Fits every basis element against the basis itself, sharing one design.
/// Each report carries the coefficient error against the unit vector as
/// the detail `unit_error`.
pub fn basis_self_fit(d: usize, ell: u32, bodies: &[Polytope], group: Group, seed: u64) -> Result<Vec<(BasisElement, FitReport)>> {
    let (elements, _, design) = basis_design(d, ell, bodies, group, seed)?;
    elements
        .iter()
        .enumerate()
        .map(|(i, el)| {
            let y: Vec<f64> = design.iter().map(|row| row[i]).collect();
            let r = solve(format!("self fit {el}, d={d}, level {ell}, {group:?}"), &elements, &design, &y)?;
            let err = r
                .coefficients
                .iter()
                .enumerate()
                .map(|(k, c)| (c - if k == i { 1.0 } else { 0.0 }).abs())
                .fold(0.0, f64::max);
            Ok((*el, r.with_detail("unit_error", err).require("unit_vector_within_1e-6", err <= 1e-6)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_counts_match_closed_forms() {
        for d in 2..=5 {
            for ell in 0..=10 {
                assert_eq!(level_elements(d, ell, Group::O).len(), super::super::o_increment(d, ell));
            }
        }
        for ell in 0..=10 {
            assert_eq!(level_elements(2, ell, Group::SO).len(), super::super::so_increment(ell));
        }
    }

    #[test]
    fn json_form() {
        let e = BasisElement::Xi { p: 2, q: 0, j: 1 };
        assert_eq!(serde_json::to_string(&e).unwrap(), r#"{"kind":"xi","p":2,"q":0,"j":1}"#);
    }
}
