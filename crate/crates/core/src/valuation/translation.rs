//! Translation behaviour `x ↦ φ(K + x)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::parallel::normal_pairing;
use super::{evaluate, magnitude, steiner_coefficients, Descriptor};
use crate::error::{Error, Result};
use crate::fit::{chebyshev_nodes, least_squares, monomial_exponents, monomial_value};
use crate::geom::Polytope;
use crate::linalg::Point;
use crate::poly::MultiPoly;

/// Threshold on the relative residual of a translation fit.
pub const TRANSLATION_RESIDUAL: f64 = 1e-8;

/// Polynomial `P(x) ≈ φ(K + x)` fitted on a Chebyshev tensor grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslationPolynomial {
    pub degree: u32,
    pub poly: MultiPoly,
    /// Half-width of the translation box `[-r, r]^d`.
    pub radius: f64,
    pub nodes_per_axis: usize,
    /// RMS residual over the scale of the values.
    pub residual: f64,
    /// Residual of the refit at degree `degree + 1`.
    pub refit_residual: f64,
    /// Residual of a fit at degree `degree - 1`, if `degree > 0`.
    pub lower_residual: Option<f64>,
    pub condition: f64,
}

impl TranslationPolynomial {
    /// Top homogeneous part `P^ℓ`.
    pub fn leading_form(&self) -> MultiPoly {
        self.poly.homogeneous_part(self.degree)
    }

    /// The fit is within threshold and a degree-`ℓ+1` refit gains no more
    /// than rounding.
    pub fn degree_law_holds(&self) -> bool {
        self.residual <= TRANSLATION_RESIDUAL && self.residual <= 10.0 * self.refit_residual + 1e-12
    }
}

fn grid(d: usize, n: usize, r: f64) -> Vec<Point> {
    let nodes = chebyshev_nodes(n, -r, r);
    let mut pts = vec![vec![]];
    for _ in 0..d {
        pts = pts
            .into_iter()
            .flat_map(|p: Point| {
                nodes.iter().map(move |&t| {
                    let mut q = p.clone();
                    q.push(t);
                    q
                })
            })
            .collect();
    }
    pts
}

fn fit_degree(pts: &[Point], values: &[f64], r: f64, deg: u32, scale: f64) -> Result<(MultiPoly, f64, f64)> {
    let d = pts[0].len();
    let exps = monomial_exponents(d, deg);
    let design: Vec<Vec<f64>> = pts
        .iter()
        .map(|x| {
            let y: Vec<f64> = x.iter().map(|v| v / r).collect();
            exps.iter().map(|e| monomial_value(&y, e)).collect()
        })
        .collect();
    let ls = least_squares(&design, values, None)?;
    let mut poly = MultiPoly::zero(d);
    for (e, c) in exps.iter().zip(&ls.coeffs) {
        let k: u32 = e.iter().sum();
        poly.add_term(e.clone(), c / r.powi(k as i32));
    }
    let rms = ls.residual_norm / (pts.len() as f64).sqrt();
    Ok((poly, rms / scale, ls.condition))
}

/// Fits `x ↦ f(K + x)` by a polynomial of degree `ell` on the tensor grid
/// of `ell + 2` Chebyshev nodes per axis in `[-r, r]^d`, `r = max(1, R)`.
/// `scale` normalizes the residual; values are compared to
/// `max(scale, max |f|)`.
pub fn fit_translation<F>(f: F, p: &Polytope, ell: u32, scale: f64) -> Result<TranslationPolynomial>
where
    F: Fn(&Polytope) -> Result<f64> + Sync,
{
    let d = p.dim();
    let r = p.circumradius().max(1.0);
    let n = ell as usize + 2;
    let pts = grid(d, n, r);
    let values = pts
        .par_iter()
        .map(|x| f(&p.translate(x)))
        .collect::<Result<Vec<f64>>>()?;
    let vmax = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = vmax.max(scale).max(f64::MIN_POSITIVE);
    let (poly, residual, condition) = fit_degree(&pts, &values, r, ell, scale)?;
    let (_, refit_residual, _) = fit_degree(&pts, &values, r, ell + 1, scale)?;
    let lower_residual = if ell > 0 {
        Some(fit_degree(&pts, &values, r, ell - 1, scale)?.1)
    } else {
        None
    };
    Ok(TranslationPolynomial {
        degree: ell,
        poly,
        radius: r,
        nodes_per_axis: n,
        residual,
        refit_residual,
        lower_residual,
        condition,
    })
}

/// Translation polynomial of `desc` at degree `ell ≥ ℓ(desc)`.
///
/// ```
/// use rotval::geom::Polytope;
/// use rotval::valuation::{translation_polynomial, Descriptor};
/// let t = translation_polynomial(&Descriptor::xi(2, 0), &Polytope::cube(2), 2).unwrap();
/// // 4|x|² + 8
/// assert!((t.poly.coeff(&[2, 0]) - 4.0).abs() < 1e-8);
/// assert!((t.poly.coeff(&[0, 0]) - 8.0).abs() < 1e-8);
/// ```
pub fn translation_polynomial(desc: &Descriptor, p: &Polytope, ell: u32) -> Result<TranslationPolynomial> {
    desc.check_dim(p.dim())?;
    if ell < desc.degree() {
        return Err(Error::InvalidArgument(format!(
            "degree {ell} is below the degree of polynomiality {} of {desc}",
            desc.degree()
        )));
    }
    let scale = magnitude(desc, p)?;
    let t = fit_translation(|k| evaluate(desc, k), p, ell, scale)?;
    if t.residual > TRANSLATION_RESIDUAL {
        return Err(Error::ResidualTooLarge {
            residual: t.residual,
            threshold: TRANSLATION_RESIDUAL,
            context: format!("translation fit of {desc} at degree {ell}"),
        });
    }
    Ok(t)
}

/// Translation polynomial of the derivative valuation `ξ^{(j)}`, `j!` times
/// the `ε^j` coefficient of `φ(K + εB)`.
pub fn derivative_translation_polynomial(desc: &Descriptor, j: usize, p: &Polytope, ell: u32) -> Result<TranslationPolynomial> {
    let scale = steiner_coefficients(desc, p)?.derivative(j).abs();
    fit_translation(|k| Ok(steiner_coefficients(desc, k)?.derivative(j)), p, ell, scale)
}

/// The face-wise pairing `|x|^{2q} Σ_G vol(G) ∫_{n(K,G)} ⟨x, u⟩^p du` over
/// faces `G` of codimension `j` (dimension `d - 1 - j`), with `j!` applied.
///
/// It equals `binom(d-1, j) |x|^{2q} ∫ ⟨x, ω⟩^p dS_{d-1-j}(K, ω)` times `j!`,
/// the leading form of `ξ_{p,q}^{(j)}` for `p ≥ 2`.
pub fn leading_form_pairing(p_exp: u32, q: u32, j: usize, k: &Polytope) -> Result<MultiPoly> {
    let d = k.dim();
    let pairing = normal_pairing(k, j, p_exp)?;
    let fact: f64 = (1..=j).map(|i| i as f64).product();
    Ok(&pairing * &MultiPoly::norm_squared(d).pow(q).scale(&fact))
}

/// Empirical constant `κ` in `D ξ_{1,q}^{(j)}(K)(x) = κ W_j(K) |x|^{2q}`:
/// the `x_1^{2q}` coefficient of the leading form divided by `W_j(K)`.
pub fn measure_kappa(q: u32, j: usize, k: &Polytope) -> Result<f64> {
    let desc = Descriptor::xi(1, q);
    let t = derivative_translation_polynomial(&desc, j, k, 2 * q)?;
    let w = super::quermassintegrals(k)?;
    let mut e = vec![0; k.dim()];
    e[0] = 2 * q;
    Ok(t.leading_form().coeff(&e) / w[j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::build_polytope;

    #[test]
    fn moment_one_expansion() {
        let tri = build_polytope(&[vec![0.0, 0.0], vec![2.0, 0.0], vec![0.5, 1.0]], 2).unwrap();
        let t = translation_polynomial(&Descriptor::moment(1), &tri, 2).unwrap();
        let lead = t.leading_form();
        assert!((lead.coeff(&[2, 0]) - 1.0).abs() < 1e-8);
        assert!(lead.coeff(&[1, 1]).abs() < 1e-8);
        assert!(t.degree_law_holds());
    }

    #[test]
    fn square_pairing() {
        let sq = Polytope::cube(2);
        let form = leading_form_pairing(2, 0, 0, &sq).unwrap();
        assert!((form.coeff(&[2, 0]) - 4.0).abs() < 1e-14);
        assert!((form.coeff(&[0, 2]) - 4.0).abs() < 1e-14);
        assert!(form.coeff(&[1, 1]).abs() < 1e-14);
    }

    #[test]
    fn kappa_is_stable_across_bodies() {
        let a = measure_kappa(1, 0, &Polytope::cube(2)).unwrap();
        let tri = build_polytope(&[vec![0.0, 0.0], vec![2.0, 0.0], vec![0.5, 1.0]], 2).unwrap();
        let b = measure_kappa(1, 0, &tri).unwrap();
        assert!((a - b).abs() < 1e-7 * a.abs());
    }
}
