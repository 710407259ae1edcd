use serde::{Deserialize, Serialize};

use super::parallel::{parallel_polynomial, parallel_value, ArcMode, Kernel};
use super::{evaluate, Descriptor};
use crate::error::{Error, Result};
use crate::fit::{chebyshev_fit, chebyshev_nodes};
use crate::geom::Polytope;
use crate::linalg::{binomial, factorial};
use crate::poly::UPoly;

/// `ε ↦ φ(K + εB)` as `Σ c_j ε^j`, `j ≤ degree_bound`.
///
/// `derivatives[j] = j! c_j` is the derivative valuation `φ^{(j)}(K)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonPolynomial {
    pub degree_bound: usize,
    pub coeffs: Vec<f64>,
    pub derivatives: Vec<f64>,
}

impl EpsilonPolynomial {
    pub fn from_coeffs(degree_bound: usize, mut coeffs: Vec<f64>) -> Self {
        coeffs.resize(degree_bound + 1, 0.0);
        let derivatives = coeffs.iter().enumerate().map(|(j, c)| c * factorial(j)).collect();
        EpsilonPolynomial {
            degree_bound,
            coeffs,
            derivatives,
        }
    }

    pub fn coeff(&self, j: usize) -> f64 {
        self.coeffs.get(j).copied().unwrap_or(0.0)
    }

    pub fn derivative(&self, j: usize) -> f64 {
        self.derivatives.get(j).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, eps: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * eps + c)
    }

    pub fn as_upoly(&self) -> UPoly {
        UPoly::new(self.coeffs.clone())
    }
}

fn check_engine(desc: &Descriptor, p: &Polytope) -> Result<()> {
    desc.check_dim(p.dim())?;
    if p.dim() > 3 {
        return Err(Error::UnsupportedDimension(p.dim(), "1..=3 for parallel bodies"));
    }
    Ok(())
}

/// `φ(K + εB)` for one `ε ≥ 0`. The integrand is evaluated pointwise on the
/// patches of the parallel body, independently of the symbolic expansion.
///
/// ```
/// use rotval::geom::Polytope;
/// use rotval::valuation::{evaluate_on_parallel_body, Descriptor};
/// let v = evaluate_on_parallel_body(&Descriptor::moment(0), &Polytope::cube(2), 1.0).unwrap();
/// assert!((v - (12.0 + std::f64::consts::PI)).abs() < 1e-12);
/// ```
pub fn evaluate_on_parallel_body(desc: &Descriptor, p: &Polytope, eps: f64) -> Result<f64> {
    check_engine(desc, p)?;
    if eps < 0.0 {
        return Err(Error::NegativeRadius(eps));
    }
    if eps == 0.0 {
        return evaluate(desc, p);
    }
    parallel_value(&Kernel::from(desc), p, eps)
}

/// Truncates an engine expansion to `bound`, checking that nothing of
/// significance is dropped.
fn truncate(poly: &UPoly, bound: usize) -> Result<Vec<f64>> {
    let scale = poly.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    for k in bound + 1..poly.len() {
        if poly.coeff(k).abs() > 1e-12 * scale.max(1.0) {
            return Err(Error::ResidualTooLarge {
                residual: poly.coeff(k).abs(),
                threshold: 1e-12 * scale.max(1.0),
                context: format!("epsilon coefficient {k} beyond the degree bound {bound}"),
            });
        }
    }
    Ok((0..=bound).map(|k| poly.coeff(k)).collect())
}

/// Steiner-type expansion of `φ(K + εB)`, symbolic in `ε`.
///
/// ```
/// use rotval::geom::Polytope;
/// use rotval::valuation::{steiner_coefficients, Descriptor};
/// let e = steiner_coefficients(&Descriptor::moment(0), &Polytope::cube(2)).unwrap();
/// assert!((e.coeffs[1] - 8.0).abs() < 1e-12);
/// assert!((e.coeffs[2] - std::f64::consts::PI).abs() < 1e-12);
/// ```
pub fn steiner_coefficients(desc: &Descriptor, p: &Polytope) -> Result<EpsilonPolynomial> {
    check_engine(desc, p)?;
    let bound = desc.epsilon_degree_bound(p.dim());
    let poly = parallel_polynomial(&Kernel::from(desc), p, ArcMode::Exact)?;
    Ok(EpsilonPolynomial::from_coeffs(bound, truncate(&poly, bound)?))
}

/// Expansion of an arbitrary kernel; `bound` is the known degree bound.
pub fn kernel_expansion(kernel: &Kernel, p: &Polytope, bound: usize) -> Result<EpsilonPolynomial> {
    let poly = parallel_polynomial(kernel, p, ArcMode::Exact)?;
    Ok(EpsilonPolynomial::from_coeffs(bound, truncate(&poly, bound)?))
}

/// Diagnostics of the fitted expansion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinerFit {
    pub poly: EpsilonPolynomial,
    /// Relative residual of the degree-`D` fit.
    pub residual: f64,
    /// Largest coefficient of degree `D+1, D+2` in the interpolating fit,
    /// in units of `ε / R` and relative to the largest value.
    pub overflow: f64,
    pub condition: f64,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

/// Second, independent path: values at `D + 3` Chebyshev nodes on
/// `[0, R]` (`R` the circumradius) fitted at degree `D`, plus an
/// interpolating fit of degree `D + 2` whose top coefficients must vanish.
pub fn steiner_by_fit(desc: &Descriptor, p: &Polytope) -> Result<SteinerFit> {
    check_engine(desc, p)?;
    let bound = desc.epsilon_degree_bound(p.dim());
    let r = if p.is_empty() { 1.0 } else { p.circumradius().max(1e-3) };
    let nodes = chebyshev_nodes(bound + 3, 0.0, r);
    let values = nodes
        .iter()
        .map(|&e| evaluate_on_parallel_body(desc, p, e))
        .collect::<Result<Vec<f64>>>()?;
    let (poly, residual, condition) = chebyshev_fit(&nodes, &values, bound, r)?;
    let (ext, _, _) = chebyshev_fit(&nodes, &values, bound + 2, r)?;
    let vmax = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let overflow = (bound + 1..=bound + 2)
        .map(|k| (ext.coeff(k) * r.powi(k as i32)).abs() / vmax)
        .fold(0.0, f64::max);
    Ok(SteinerFit {
        poly: EpsilonPolynomial::from_coeffs(bound, poly.coeffs),
        residual,
        overflow,
        condition,
        nodes,
        values,
    })
}

/// Quermassintegrals `W_0..W_d` from `vol(K + εB) = Σ binom(d, j) W_j ε^j`.
///
/// ```
/// use rotval::geom::Polytope;
/// use rotval::valuation::quermassintegrals;
/// let w = quermassintegrals(&Polytope::cube(2)).unwrap();
/// assert!((w[0] - 4.0).abs() < 1e-12 && (w[1] - 4.0).abs() < 1e-12);
/// assert!((w[2] - std::f64::consts::PI).abs() < 1e-12);
/// ```
pub fn quermassintegrals(p: &Polytope) -> Result<Vec<f64>> {
    let d = p.dim();
    let e = steiner_coefficients(&Descriptor::moment(0), p)?;
    Ok((0..=d).map(|j| e.coeff(j) / binomial(d, j)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn fit_path_agrees_on_the_square() {
        let sq = Polytope::cube(2);
        let a = steiner_coefficients(&Descriptor::moment(1), &sq).unwrap();
        let b = steiner_by_fit(&Descriptor::moment(1), &sq).unwrap();
        assert!(b.overflow < 1e-9 && b.residual < 1e-12);
        for k in 0..=4 {
            assert!((a.coeff(k) - b.poly.coeff(k)).abs() < 1e-9, "{k}");
        }
        assert!((a.coeff(4) - PI / 2.0).abs() < 1e-13);
        assert_eq!(a.coeffs.len(), 5);
    }

    #[test]
    fn derivatives_carry_factorials() {
        let e = steiner_coefficients(&Descriptor::xi(0, 0), &Polytope::cube(3)).unwrap();
        // area of ∂(K + εB) = 24 + 12πε + 4πε²
        assert!((e.derivative(2) - 2.0 * e.coeff(2)).abs() < 1e-12);
        assert!((e.coeff(2) - 4.0 * PI).abs() < 1e-10);
    }
}
