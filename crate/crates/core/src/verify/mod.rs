//! Checks of the structural properties: additivity, polynomiality under
//! Minkowski combinations, invariance, dimension counts, basis membership.

mod basis;
mod dims;

pub use basis::{basis_elements, basis_self_fit, evaluate_elements, fit_in_basis, BasisElement, BasisFit, TRANSLATES_PER_BODY};
pub use dims::{dimension_table, o_increment, so_increment, DimensionEntry, DimensionTable, Group};

use crate::error::{Error, Result};
use crate::fit::{chebyshev_nodes, least_squares, monomial_exponents, monomial_value, FitReport};
use crate::geom::{minkowski_sum, split_by_hyperplane, Hyperplane, Polytope};
use crate::linalg::{det, orthogonality_defect, Matrix};
use crate::poly::MultiPoly;
use crate::valuation::{evaluate, magnitude, Descriptor};

/// Default threshold for checks computed along exact paths.
pub const EXACT_THRESHOLD: f64 = 1e-9;

/// `φ(P) + φ(P ∩ H) − φ(P ∩ H⁺) − φ(P ∩ H⁻)`, relative to the largest
/// magnitude involved.
///
/// ```
/// use rotval::geom::{Hyperplane, Polytope};
/// use rotval::valuation::Descriptor;
/// use rotval::verify::check_additivity;
/// let h = Hyperplane::new(vec![1.0, 0.0], 0.0).unwrap();
/// let r = check_additivity(&Descriptor::xi(2, 0), &Polytope::cube(2), &h).unwrap();
/// assert!(r.pass && r.residual < 1e-14);
/// ```
pub fn check_additivity(desc: &Descriptor, p: &Polytope, h: &Hyperplane) -> Result<FitReport> {
    desc.check_dim(p.dim())?;
    h.validate()?;
    if !p.is_full_dimensional() {
        return Err(Error::LowerDimensional {
            dim: p.dim(),
            intrinsic: p.intrinsic_dim(),
        });
    }
    let s = split_by_hyperplane(p, h)?;
    let whole = evaluate(desc, p)?;
    let plus = evaluate(desc, &s.plus)?;
    let minus = evaluate(desc, &s.minus)?;
    let slice = evaluate(desc, &s.slice)?;
    let scale = [magnitude(desc, p)?, whole.abs(), plus.abs(), minus.abs(), slice.abs()]
        .into_iter()
        .fold(f64::MIN_POSITIVE, f64::max);
    let residual = (whole + slice - plus - minus).abs() / scale;
    Ok(FitReport::check(format!("additivity {desc}"), residual, EXACT_THRESHOLD)
        .with_detail("whole", whole)
        .with_detail("plus", plus)
        .with_detail("minus", minus)
        .with_detail("slice", slice))
}

/// `Σ λ_j K_j`, skipping the empty combination.
pub fn minkowski_combination(bodies: &[Polytope], lambda: &[f64]) -> Result<Polytope> {
    let d = bodies[0].dim();
    let mut acc: Option<Polytope> = None;
    for (k, &l) in bodies.iter().zip(lambda) {
        let term = if l == 0.0 {
            crate::geom::build_polytope(&[vec![0.0; d]], d)?
        } else {
            k.scale(l)?
        };
        acc = Some(match acc {
            None => term,
            Some(a) => minkowski_sum(&a, &term)?,
        });
    }
    acc.ok_or_else(|| Error::InvalidArgument("no bodies".into()))
}

/// Result of fitting `λ ↦ f(Σ λ_j K_j)` on `[0, 1]^s`.
#[derive(Clone, Debug)]
pub struct MinkowskiFit {
    pub poly: MultiPoly,
    pub residual: f64,
    /// Largest coefficient of degree `degree + 1` in the refit, relative to
    /// the largest value.
    pub overflow: f64,
    pub condition: f64,
    pub grid_points: usize,
}

/// Fits `λ ↦ f(Σ λ_j K_j)` at total degree `degree` on the tensor grid of
/// `nodes` Chebyshev points per axis of `[0, 1]^s`, and refits at
/// `degree + 1`.
pub fn minkowski_fit<F>(f: F, bodies: &[Polytope], degree: u32, nodes: usize) -> Result<MinkowskiFit>
where
    F: Fn(&Polytope) -> Result<f64> + Sync,
{
    use rayon::prelude::*;
    let s = bodies.len();
    if s == 0 || s > 4 {
        return Err(Error::InvalidArgument(format!("need 1 to 4 bodies, got {s}")));
    }
    if bodies.iter().any(|b| b.dim() != bodies[0].dim()) {
        return Err(Error::DimensionMismatch(bodies[0].dim(), bodies.iter().map(|b| b.dim()).max().unwrap()));
    }
    if nodes < degree as usize + 2 {
        return Err(Error::InvalidArgument(format!(
            "grid of {nodes} nodes per axis is too small for degree {}",
            degree + 1
        )));
    }
    let axis = chebyshev_nodes(nodes, 0.0, 1.0);
    let mut grid: Vec<Vec<f64>> = vec![vec![]];
    for _ in 0..s {
        grid = grid
            .into_iter()
            .flat_map(|g| {
                axis.iter().map(move |&t| {
                    let mut h = g.clone();
                    h.push(t);
                    h
                })
            })
            .collect();
    }
    let values = grid
        .par_iter()
        .map(|l| f(&minkowski_combination(bodies, l)?))
        .collect::<Result<Vec<f64>>>()?;
    let vmax = values.iter().fold(f64::MIN_POSITIVE, |m, v| m.max(v.abs()));
    let fit = |deg: u32| -> Result<(Vec<Vec<u32>>, crate::fit::LeastSquares)> {
        let exps = monomial_exponents(s, deg);
        let design: Vec<Vec<f64>> = grid
            .iter()
            .map(|l| exps.iter().map(|e| monomial_value(l, e)).collect())
            .collect();
        Ok((exps, least_squares(&design, &values, None)?))
    };
    let (exps, ls) = fit(degree)?;
    let (exps1, ls1) = fit(degree + 1)?;
    let overflow = exps1
        .iter()
        .zip(&ls1.coeffs)
        .filter(|(e, _)| e.iter().sum::<u32>() == degree + 1)
        .map(|(_, c)| c.abs() / vmax)
        .fold(0.0, f64::max);
    let poly = MultiPoly::from_terms(s, exps.into_iter().zip(ls.coeffs.iter().copied()));
    let rms = ls.residual_norm / (grid.len() as f64).sqrt();
    Ok(MinkowskiFit {
        poly,
        residual: rms / vmax,
        overflow,
        condition: ls.condition,
        grid_points: grid.len(),
    })
}

/// Polynomiality of `λ ↦ φ(Σ λ_j K_j)` at degree `d + ℓ`: residual at most
/// `1e-8` and overflow coefficients at most `1e-6`.
pub fn check_minkowski_polynomiality(desc: &Descriptor, bodies: &[Polytope], ell: u32) -> Result<FitReport> {
    let d = bodies.first().map_or(0, |b| b.dim());
    desc.check_dim(d)?;
    let degree = d as u32 + ell;
    let fit = minkowski_fit(|k| evaluate(desc, k), bodies, degree, degree as usize + 2)?;
    let rows = fit.grid_points;
    let cols = monomial_exponents(bodies.len(), degree).len();
    let coeffs = fit.poly.terms().map(|(_, c)| *c).collect();
    Ok(FitReport::new(format!("minkowski {desc}"), (rows, cols), coeffs, fit.residual, fit.condition, 1e-8)
        .with_detail("overflow", fit.overflow)
        .require("overflow_within_1e-6", fit.overflow <= 1e-6))
}

/// Invariance of `φ` under the given orthogonal maps. Rotations must
/// preserve `φ`; reflections in the plane multiply `ψ_{p,q}` by `(-1)^q`
/// and preserve the other families.
pub fn check_invariance(desc: &Descriptor, p: &Polytope, transforms: &[Matrix]) -> Result<FitReport> {
    desc.check_dim(p.dim())?;
    let base = evaluate(desc, p)?;
    let mut worst = 0.0f64;
    for m in transforms {
        let defect = orthogonality_defect(m);
        if defect > 1e-12 {
            return Err(Error::NonOrthogonal(defect));
        }
        let sign = match desc {
            Descriptor::Psi { q, .. } if det(m) < 0.0 && q % 2 == 1 => -1.0,
            _ => 1.0,
        };
        let v = evaluate(desc, &p.transform(m)?)?;
        worst = worst.max((v - sign * base).abs());
    }
    let scale = magnitude(desc, p)?.max(base.abs()).max(f64::MIN_POSITIVE);
    Ok(FitReport::check(format!("invariance {desc}"), worst / scale, EXACT_THRESHOLD)
        .with_detail("transforms", transforms.len() as f64)
        .with_detail("value", base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::build_polytope;

    #[test]
    fn single_body_volume_is_homogeneous() {
        let tri = build_polytope(&[vec![0.0, 0.0], vec![1.0, 0.2], vec![0.3, 0.9]], 2).unwrap();
        let fit = minkowski_fit(|k| evaluate(&Descriptor::moment(0), k), std::slice::from_ref(&tri), 2, 4).unwrap();
        assert!((fit.poly.coeff(&[2]) - tri.volume()).abs() < 1e-12);
        assert!(fit.poly.coeff(&[1]).abs() < 1e-12);
    }

    #[test]
    fn reflection_flips_odd_psi() {
        let tri = build_polytope(&[vec![0.1, 0.0], vec![1.0, 0.3], vec![0.4, 0.9]], 2).unwrap();
        let m = vec![vec![1.0, 0.0], vec![0.0, -1.0]];
        let r = check_invariance(&Descriptor::psi(2, 1), &tri, &[m.clone()]).unwrap();
        assert!(r.pass);
        let flipped = evaluate(&Descriptor::psi(2, 1), &tri.transform(&m).unwrap()).unwrap();
        let orig = evaluate(&Descriptor::psi(2, 1), &tri).unwrap();
        assert!(orig.abs() > 1e-3 && (flipped + orig).abs() < 1e-12);
    }
}
