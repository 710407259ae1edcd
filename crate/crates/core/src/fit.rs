//! Least squares with column equilibration, Chebyshev nodes, and the
//! report type shared by the verification routines.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::UPoly;

/// Outcome of one fit or one residual check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub name: String,
    /// `(rows, columns)` of the design matrix; `(1, 0)` for plain residual checks.
    pub design_shape: (usize, usize),
    pub coefficients: Vec<f64>,
    pub residual: f64,
    pub condition: f64,
    pub threshold: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
}

impl FitReport {
    pub fn new(name: impl Into<String>, design_shape: (usize, usize), coefficients: Vec<f64>, residual: f64, condition: f64, threshold: f64) -> Self {
        FitReport {
            name: name.into(),
            design_shape,
            coefficients,
            residual,
            condition,
            threshold,
            pass: residual.is_finite() && residual <= threshold,
            details: BTreeMap::new(),
        }
    }

    /// A residual check without a design matrix.
    pub fn check(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Self::new(name, (1, 0), vec![], residual, 1.0, threshold)
    }

    pub fn with_detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }

    /// Fails the report unless `ok`; the reason is kept as a detail.
    pub fn require(mut self, key: &str, ok: bool) -> Self {
        self.details.insert(key.to_string(), if ok { 1.0 } else { 0.0 });
        self.pass &= ok;
        self
    }
}

/// Solution of a (weighted) least-squares problem.
#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub coeffs: Vec<f64>,
    /// `‖A c − y‖₂` (weighted).
    pub residual_norm: f64,
    /// Residual vector `A c − y` (unweighted).
    pub residuals: Vec<f64>,
    /// Ratio of extreme singular values after column equilibration.
    pub condition: f64,
    /// `(Aᵀ W A)^{-1}`, the coefficient covariance for unit-variance weights.
    pub covariance: Vec<Vec<f64>>,
}

/// Minimizes `Σ w_i (Σ_k A_ik c_k − y_i)²` by Householder QR of the
/// column-scaled matrix, with one step of iterative refinement.
///
/// Fails with [`Error::RankDeficient`] when the smallest scaled singular value
/// is below `1e-13` of the largest.
pub fn least_squares(a: &[Vec<f64>], y: &[f64], weights: Option<&[f64]>) -> Result<LeastSquares> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    if rows != y.len() || rows < cols || cols == 0 {
        return Err(Error::InvalidArgument(format!(
            "least squares needs rows >= cols > 0, got {rows}x{cols} with {} targets",
            y.len()
        )));
    }
    let sw: Vec<f64> = match weights {
        Some(w) => w.iter().map(|x| x.sqrt()).collect(),
        None => vec![1.0; rows],
    };
    let mut m = DMatrix::from_fn(rows, cols, |i, j| a[i][j] * sw[i]);
    let mut colscale = vec![1.0; cols];
    for j in 0..cols {
        let n = m.column(j).norm();
        if n > 0.0 {
            colscale[j] = n;
            m.column_mut(j).scale_mut(1.0 / n);
        }
    }
    let b = DVector::from_fn(rows, |i, _| y[i] * sw[i]);
    let sv = m.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    if ratio < 1e-13 {
        return Err(Error::RankDeficient { rows, cols, ratio });
    }
    let pinv = scaled_pseudo_inverse(&m).ok_or(Error::RankDeficient { rows, cols, ratio })?;
    let mut z = &pinv * &b;
    let r = &b - &m * &z;
    z += &pinv * r;
    let coeffs: Vec<f64> = (0..cols).map(|j| z[j] / colscale[j]).collect();
    let residuals: Vec<f64> = (0..rows)
        .map(|i| a[i].iter().zip(&coeffs).map(|(x, c)| x * c).sum::<f64>() - y[i])
        .collect();
    let residual_norm = residuals
        .iter()
        .zip(&sw)
        .map(|(r, s)| (r * s) * (r * s))
        .sum::<f64>()
        .sqrt();
    // (MᵀM)⁻¹ = M⁺ M⁺ᵀ
    let gram_inv = &pinv * pinv.transpose();
    let covariance = (0..cols)
        .map(|i| (0..cols).map(|j| gram_inv[(i, j)] / (colscale[i] * colscale[j])).collect())
        .collect();
    Ok(LeastSquares {
        coeffs,
        residual_norm,
        residuals,
        condition: 1.0 / ratio,
        covariance,
    })
}

/// `R⁻¹ Qᵀ` for a tall matrix of full column rank.
///
/// Householder QR rather than SVD: nalgebra's SVD occasionally returns
/// singular vectors accurate only to about `1e-7` on equilibrated
/// polynomial designs.
pub(crate) fn scaled_pseudo_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let qr = m.clone().qr();
    let r = qr.r();
    let q = qr.q();
    r.solve_upper_triangular(&q.transpose())
}

/// `n` Chebyshev points of the first kind on `[a, b]`, increasing.
pub fn chebyshev_nodes(n: usize, a: f64, b: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let t = -((2 * k + 1) as f64 * PI / (2 * n) as f64).cos();
            0.5 * (a + b) + 0.5 * (b - a) * t
        })
        .collect()
}

/// Monomial coefficients of the shifted Chebyshev polynomials
/// `T_k(2τ − 1)`, `k = 0..n`.
pub fn shifted_chebyshev_basis(n: usize) -> Vec<UPoly> {
    let x = UPoly::linear(-1.0, 2.0);
    let mut out = vec![UPoly::constant(1.0), x.clone()];
    while out.len() < n {
        let k = out.len();
        let mut next = x.mul(&out[k - 1]).scale(2.0);
        next.add_scaled(-1.0, &out[k - 2]);
        out.push(next);
    }
    out.truncate(n);
    out
}

/// Least-squares polynomial of degree `deg` through `(x_i, y_i)`, `x_i ∈
/// [0, r]`, solved in the shifted Chebyshev basis of `τ = x / r` and
/// returned as monomial coefficients in `x`, with the fit's relative
/// residual `‖r‖ / ‖y‖` and condition estimate.
pub fn chebyshev_fit(xs: &[f64], ys: &[f64], deg: usize, r: f64) -> Result<(UPoly, f64, f64)> {
    let basis = shifted_chebyshev_basis(deg + 1);
    let design: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| basis.iter().map(|t| t.eval(x / r)).collect())
        .collect();
    let ls = least_squares(&design, ys, None)?;
    let mut mono = UPoly::zero();
    for (c, t) in ls.coeffs.iter().zip(&basis) {
        mono.add_scaled(*c, t);
    }
    let coeffs: Vec<f64> = (0..=deg).map(|k| mono.coeff(k) / r.powi(k as i32)).collect();
    let ynorm = ys.iter().map(|y| y * y).sum::<f64>().sqrt();
    let rel = if ynorm > 0.0 { ls.residual_norm / ynorm } else { ls.residual_norm };
    Ok((UPoly::new(coeffs), rel, ls.condition))
}

/// Exponents of all monomials in `n` variables with total degree `≤ deg`,
/// in graded order.
pub fn monomial_exponents(n: usize, deg: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=deg {
        let mut cur = vec![0u32; n];
        compositions(n, total, 0, &mut cur, &mut out);
    }
    out
}

fn compositions(n: usize, left: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if n == 0 {
        if left == 0 {
            out.push(vec![]);
        }
        return;
    }
    if pos == n - 1 {
        cur[pos] = left;
        out.push(cur.clone());
        return;
    }
    for k in (0..=left).rev() {
        cur[pos] = k;
        compositions(n, left - k, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

/// `∏ x_i^{e_i}`
pub fn monomial_value(x: &[f64], e: &[u32]) -> f64 {
    x.iter().zip(e).map(|(v, &k)| v.powi(k as i32)).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_line() {
        let a: Vec<Vec<f64>> = (0..5).map(|i| vec![1.0, i as f64]).collect();
        let y: Vec<f64> = (0..5).map(|i| 2.0 - 3.0 * i as f64).collect();
        let ls = least_squares(&a, &y, None).unwrap();
        assert!((ls.coeffs[0] - 2.0).abs() < 1e-13 && (ls.coeffs[1] + 3.0).abs() < 1e-13);
        assert!(ls.residual_norm < 1e-12);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let a: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        assert!(matches!(least_squares(&a, &[0.0; 4], None), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn chebyshev_fit_of_a_cubic() {
        let xs = chebyshev_nodes(7, 0.0, 3.0);
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 - x + 0.5 * x * x * x).collect();
        let (p, rel, _) = chebyshev_fit(&xs, &ys, 4, 3.0).unwrap();
        let want = [1.0, -1.0, 0.0, 0.5, 0.0];
        for (k, w) in want.iter().enumerate() {
            assert!((p.coeff(k) - w).abs() < 1e-12, "{k}");
        }
        assert!(rel < 1e-14);
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomial_exponents(2, 2).len(), 6);
        assert_eq!(monomial_exponents(3, 4).len(), 35);
        assert_eq!(monomial_exponents(4, 4).len(), 70);
    }

    #[test]
    fn weighted_covariance_of_mean() {
        let a = vec![vec![1.0]; 4];
        let y = [1.0, 2.0, 3.0, 4.0];
        let w = [4.0; 4];
        let ls = least_squares(&a, &y, Some(&w)).unwrap();
        assert!((ls.coeffs[0] - 2.5).abs() < 1e-14);
        assert!((ls.covariance[0][0] - 1.0 / 16.0).abs() < 1e-14);
    }
}
