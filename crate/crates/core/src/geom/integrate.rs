use std::ops::Div;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, Zero};

use super::Polytope;
use crate::error::{Error, Result};
use crate::linalg::{gram_volume, sub, Point};
use crate::poly::{Coeff, MultiPoly};

/// Coefficient field usable by the simplex integrator.
pub trait Field: Coeff + Div<Output = Self> {
    fn from_f64_exact(x: f64) -> Self;
    fn from_u64(n: u64) -> Self;
    fn abs_val(&self) -> Self;
}

impl Field for f64 {
    fn from_f64_exact(x: f64) -> Self {
        x
    }
    fn from_u64(n: u64) -> Self {
        n as f64
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
}

impl Field for BigRational {
    fn from_f64_exact(x: f64) -> Self {
        BigRational::from_f64(x).expect("finite coordinate")
    }
    fn from_u64(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
}

fn factorial_t<T: Field>(n: u32) -> T {
    (1..=n as u64).fold(T::one(), |acc, k| acc * T::from_u64(k))
}

/// `∫_Δ t^β dt` over the unit simplex `Δ ⊂ R^m`, `m = β.len()`:
/// `∏ β_i! / (m + |β|)!`.
pub fn simplex_monomial_integral<T: Field>(beta: &[u32]) -> T {
    let m = beta.len() as u32;
    let total: u32 = beta.iter().sum();
    let num = beta.iter().fold(T::one(), |acc, &b| acc * factorial_t::<T>(b));
    num / factorial_t::<T>(m + total)
}

/// `Σ_β c_β ∫_Δ t^β` for a polynomial already pulled back to the unit simplex.
fn unit_simplex_integral<T: Field>(p: &MultiPoly<T>) -> T {
    let mut total = T::zero();
    for (e, c) in p.terms() {
        total = total + c.clone() * simplex_monomial_integral::<T>(e);
    }
    total
}

/// Affine chart `t ↦ v0 + Σ t_i (v_i - v0)` as substitutions for each
/// ambient coordinate.
fn simplex_chart<T: Field>(verts: &[Vec<T>]) -> Vec<MultiPoly<T>> {
    let m = verts.len() - 1;
    let d = verts[0].len();
    (0..d)
        .map(|k| {
            let coeffs: Vec<T> = (1..=m)
                .map(|i| verts[i][k].clone() - verts[0][k].clone())
                .collect();
            MultiPoly::affine(verts[0][k].clone(), &coeffs)
        })
        .collect()
}

/// `∫_S f dσ` over the `m`-simplex `S` with vertices `verts` (in `R^d`), with
/// respect to `m`-dimensional measure. Exact up to rounding.
pub fn integrate_over_simplex(verts: &[Point], f: &MultiPoly) -> f64 {
    let m = verts.len() - 1;
    if m == 0 {
        return f.eval(&verts[0]);
    }
    let edges: Vec<Point> = verts[1..].iter().map(|v| sub(v, &verts[0])).collect();
    let jac = gram_volume(&edges);
    let pulled = f.compose(&simplex_chart(verts));
    jac * unit_simplex_integral(&pulled)
}

/// `∫_P f dx` for a full-dimensional polytope, summing exact monomial
/// formulas over the triangulation.
///
/// ```
/// use rotval::geom::{build_polytope, integrate_polynomial};
/// use rotval::poly::MultiPoly;
/// let tri = build_polytope(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]], 2).unwrap();
/// let xy = &MultiPoly::var(2, 0) * &MultiPoly::var(2, 1);
/// assert!((integrate_polynomial(&tri, &xy).unwrap() - 1.0 / 24.0).abs() < 1e-15);
/// ```
pub fn integrate_polynomial(p: &Polytope, f: &MultiPoly) -> Result<f64> {
    if f.dim() != p.dim() {
        return Err(Error::DimensionMismatch(f.dim(), p.dim()));
    }
    if p.is_empty() {
        return Ok(0.0);
    }
    if !p.is_full_dimensional() {
        return Err(Error::LowerDimensional {
            dim: p.dim(),
            intrinsic: p.intrinsic_dim(),
        });
    }
    let v = p.vertices();
    Ok(p
        .triangulation()
        .iter()
        .map(|s| {
            let pts: Vec<Point> = s.iter().map(|&i| v[i].clone()).collect();
            integrate_over_simplex(&pts, f)
        })
        .sum())
}

fn det_exact<T: Field>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    let mut d = T::one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return T::zero();
        };
        if piv != c {
            m.swap(piv, c);
            d = -d;
        }
        d = d * m[c][c].clone();
        for r in c + 1..n {
            let f = m[r][c].clone() / m[c][c].clone();
            if !f.is_zero() {
                for k in c..n {
                    let t = m[c][k].clone();
                    m[r][k] = m[r][k].clone() - f.clone() * t;
                }
            }
        }
    }
    d
}

/// Exact `∫_P f` in rational arithmetic. Vertex coordinates are converted
/// exactly from their binary floating-point values.
pub fn integrate_polynomial_exact(p: &Polytope, f: &MultiPoly<BigRational>) -> Result<BigRational> {
    if f.dim() != p.dim() {
        return Err(Error::DimensionMismatch(f.dim(), p.dim()));
    }
    if p.is_empty() {
        return Ok(BigRational::zero());
    }
    if !p.is_full_dimensional() {
        return Err(Error::LowerDimensional {
            dim: p.dim(),
            intrinsic: p.intrinsic_dim(),
        });
    }
    let verts: Vec<Vec<BigRational>> = p
        .vertices()
        .iter()
        .map(|v| v.iter().map(|&x| BigRational::from_f64_exact(x)).collect())
        .collect();
    let mut total = BigRational::zero();
    for s in p.triangulation() {
        let sv: Vec<Vec<BigRational>> = s.iter().map(|&i| verts[i].clone()).collect();
        let rows: Vec<Vec<BigRational>> = sv[1..]
            .iter()
            .map(|v| v.iter().zip(&sv[0]).map(|(a, b)| a - b).collect())
            .collect();
        let jac = det_exact(rows).abs_val();
        let pulled = f.compose(&simplex_chart(&sv));
        total += jac * unit_simplex_integral(&pulled);
    }
    Ok(total)
}

/// `g(s, n)` with the normal fixed: substitutes the last `d` variables.
pub(crate) fn fix_normal(g: &MultiPoly, n: &[f64]) -> MultiPoly {
    let d = n.len();
    let mut out = MultiPoly::zero(d);
    for (e, &c) in g.terms() {
        let mut coef = c;
        for k in 0..d {
            coef *= n[k].powi(e[d + k] as i32);
        }
        out.add_term(e[..d].to_vec(), coef);
    }
    out
}

/// `∫_{∂P} g(s, n(s)) dσ` where `g` is a polynomial in the `2d` variables
/// `(s_1..s_d, n_1..n_d)`.
///
/// Flat bodies (`intrinsic_dim = dim - 1`) are two-sided: they contribute
/// `g(s, n) + g(s, -n)` over the body. Bodies of smaller dimension
/// contribute 0.
pub fn boundary_integral(p: &Polytope, g: &MultiPoly) -> Result<f64> {
    let d = p.dim();
    if g.dim() != 2 * d {
        return Err(Error::DimensionMismatch(g.dim(), 2 * d));
    }
    if p.is_empty() || p.intrinsic_dim() + 1 < d {
        return Ok(0.0);
    }
    let v = p.vertices();
    if p.intrinsic_dim() + 1 == d {
        let n = p.flat_normal().expect("flat body has a normal");
        let neg: Point = n.iter().map(|x| -x).collect();
        let h = &fix_normal(g, &n) + &fix_normal(g, &neg);
        return Ok(p
            .triangulation()
            .iter()
            .map(|s| {
                let pts: Vec<Point> = s.iter().map(|&i| v[i].clone()).collect();
                integrate_over_simplex(&pts, &h)
            })
            .sum());
    }
    let mut total = 0.0;
    for f in p.facets() {
        let h = fix_normal(g, &f.normal);
        for s in &f.simplices {
            let pts: Vec<Point> = s.iter().map(|&i| v[i].clone()).collect();
            total += integrate_over_simplex(&pts, &h);
        }
    }
    Ok(total)
}
