//! Sparse multivariate polynomials and dense univariate polynomials.
//!
//! [`MultiPoly`] holds integrands: `f(x)` for interior integrals, `g(s, n)` in
//! `2d` variables for boundary integrals, and fitted translation polynomials.
//! Coefficients are generic so the simplex integrator can run on exact
//! rationals as well as on `f64`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Exponent multi-index.
pub type Exponent = Vec<u32>;

/// Coefficient ring for [`MultiPoly`].
pub trait Coeff:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Coeff for T where
    T: Clone
        + fmt::Debug
        + PartialEq
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct MultiPoly<T = f64> {
    dim: usize,
    #[serde(with = "term_list")]
    terms: BTreeMap<Exponent, T>,
}

/// JSON object keys must be strings, so terms travel as `[exponent, coeff]` pairs.
mod term_list {
    use super::Exponent;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<T: Serialize, S: Serializer>(terms: &BTreeMap<Exponent, T>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(terms.iter())
    }

    pub fn deserialize<'de, T: Deserialize<'de>, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Exponent, T>, D::Error> {
        Ok(Vec::<(Exponent, T)>::deserialize(d)?.into_iter().collect())
    }
}

impl<T: Coeff> MultiPoly<T> {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: T) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, T::one())
    }

    /// The coordinate function `x_i`.
    pub fn var(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Self::monomial(e, T::one())
    }

    pub fn monomial(exp: Exponent, c: T) -> Self {
        let mut p = Self::zero(exp.len());
        p.add_term(exp, c);
        p
    }

    /// `Σ c_i x_i + c0`
    pub fn affine(c0: T, coeffs: &[T]) -> Self {
        let dim = coeffs.len();
        let mut p = Self::constant(dim, c0);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; dim];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Exponent, T)>) -> Self {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            assert_eq!(e.len(), dim, "exponent length must match dimension");
            p.add_term(e, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &T)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exp: &[u32]) -> T {
        self.terms.get(exp).cloned().unwrap_or_else(T::zero)
    }

    /// Adds `c · x^exp`, dropping the entry if it cancels to zero.
    pub fn add_term(&mut self, exp: Exponent, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(v) => {
                let nv = v.clone() + c;
                if nv.is_zero() {
                    self.terms.remove(&exp);
                } else {
                    *v = nv;
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn homogeneous_part(&self, k: u32) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == k)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.dim);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &[T]) -> T {
        assert_eq!(x.len(), self.dim);
        let mut total = T::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    m = m * xi.clone();
                }
            }
            total = total + m;
        }
        total
    }

    /// Substitutes `x_i := subs[i]`, producing a polynomial in the variables of
    /// the substitutes.
    pub fn compose(&self, subs: &[MultiPoly<T>]) -> MultiPoly<T> {
        assert_eq!(subs.len(), self.dim);
        let new_dim = subs.first().map(|s| s.dim).unwrap_or(0);
        let max_exp: Vec<u32> = (0..self.dim)
            .map(|i| self.terms.keys().map(|e| e[i]).max().unwrap_or(0))
            .collect();
        // powers[i][k] = subs[i]^k
        let powers: Vec<Vec<MultiPoly<T>>> = subs
            .iter()
            .zip(&max_exp)
            .map(|(s, &m)| {
                let mut v = Vec::with_capacity(m as usize + 1);
                v.push(MultiPoly::one(new_dim));
                for k in 1..=m as usize {
                    let next = &v[k - 1] * s;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = MultiPoly::zero(new_dim);
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(new_dim, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = &term * &powers[i][k as usize];
                }
            }
            for (te, tc) in term.terms {
                out.add_term(te, tc);
            }
        }
        out
    }

    /// Maps coefficients into another ring.
    pub fn map_coeffs<U: Coeff>(&self, f: impl Fn(&T) -> U) -> MultiPoly<U> {
        let mut out = MultiPoly::zero(self.dim);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }
}

impl MultiPoly<f64> {
    /// `|x|^2` in `dim` variables.
    pub fn norm_squared(dim: usize) -> Self {
        let mut p = Self::zero(dim);
        for i in 0..dim {
            let mut e = vec![0; dim];
            e[i] = 2;
            p.add_term(e, 1.0);
        }
        p
    }

    /// Evaluates with univariate-polynomial arguments.
    pub fn eval_upoly(&self, x: &[UPoly]) -> UPoly {
        assert_eq!(x.len(), self.dim);
        let max_exp: Vec<u32> = (0..self.dim)
            .map(|i| self.terms.keys().map(|e| e[i]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<UPoly>> = x
            .iter()
            .zip(&max_exp)
            .map(|(xi, &m)| {
                let mut v = vec![UPoly::constant(1.0)];
                for k in 1..=m as usize {
                    let next = v[k - 1].mul(xi);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut total = UPoly::zero();
        for (e, &c) in &self.terms {
            let mut m = UPoly::constant(c);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    m = m.mul(&powers[i][k as usize]);
                }
            }
            total.add_assign(&m);
        }
        total
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |a, c| a.max(c.abs()))
    }

    /// Largest coefficient difference against `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut keys: Vec<&Exponent> = self.terms.keys().collect();
        keys.extend(other.terms.keys());
        keys.into_iter()
            .map(|e| (self.coeff(e) - other.coeff(e)).abs())
            .fold(0.0, f64::max)
    }

    /// Drops coefficients with magnitude at most `tol`.
    pub fn prune(&self, tol: f64) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.abs() > tol)
                .map(|(e, c)| (e.clone(), *c))
                .collect(),
        }
    }
}

impl<T: Coeff> Add for &MultiPoly<T> {
    type Output = MultiPoly<T>;
    fn add(self, rhs: Self) -> MultiPoly<T> {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<T: Coeff> Sub for &MultiPoly<T> {
    type Output = MultiPoly<T>;
    fn sub(self, rhs: Self) -> MultiPoly<T> {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<T: Coeff> Mul for &MultiPoly<T> {
    type Output = MultiPoly<T>;
    fn mul(self, rhs: Self) -> MultiPoly<T> {
        assert_eq!(self.dim, rhs.dim);
        let mut out = MultiPoly::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "·x{}", i + 1)?,
                    _ => write!(f, "·x{}^{}", i + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

/// Dense univariate polynomial `c0 + c1 t + c2 t^2 + ...`.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct UPoly {
    pub coeffs: Vec<f64>,
}

impl UPoly {
    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `a + b t`
    pub fn linear(a: f64, b: f64) -> Self {
        Self { coeffs: vec![a, b] }
    }

    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return UPoly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly { coeffs: out }
    }

    pub fn add_assign(&mut self, o: &UPoly) {
        if o.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(o.coeffs.len(), 0.0);
        }
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a += b;
        }
    }

    /// `self += s * o`
    pub fn add_scaled(&mut self, s: f64, o: &UPoly) {
        if o.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(o.coeffs.len(), 0.0);
        }
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a += s * b;
        }
    }

    pub fn scale(&self, s: f64) -> UPoly {
        UPoly {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: usize) -> UPoly {
        let mut c = vec![0.0; k];
        c.extend_from_slice(&self.coeffs);
        UPoly { coeffs: c }
    }

    pub fn pow(&self, k: u32) -> UPoly {
        let mut acc = UPoly::constant(1.0);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    /// `∫_0^t p(r) dr` as a polynomial in `t`.
    pub fn integral_from_zero(&self) -> UPoly {
        let mut c = vec![0.0; self.coeffs.len() + 1];
        for (k, a) in self.coeffs.iter().enumerate() {
            c[k + 1] = a / (k + 1) as f64;
        }
        UPoly { coeffs: c }
    }

    pub fn derivative(&self) -> UPoly {
        UPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * k as f64)
                .collect(),
        }
    }

    /// Substitutes `t := a + b t`.
    pub fn compose_linear(&self, a: f64, b: f64) -> UPoly {
        let lin = UPoly::linear(a, b);
        let mut out = UPoly::zero();
        for c in self.coeffs.iter().rev() {
            out = out.mul(&lin);
            out.add_assign(&UPoly::constant(*c));
        }
        out
    }
}
