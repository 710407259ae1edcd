use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{boundary_integral, integrate_polynomial, Polytope};
use crate::poly::MultiPoly;

/// One of the three valuation families.
///
/// * `Moment { m }`: `K ↦ ∫_K |x|^{2m} dx`
/// * `Xi { p, q }`: `K ↦ ∫_{∂K} ⟨s, n⟩^p |s|^{2q} dσ`
/// * `Psi { p, q }` (plane only): `K ↦ ∫_{∂K} ⟨s, n⟩^p ⟨s, n'⟩^q dσ`, with
///   `n'` the normal rotated by `+π/2`.
///
/// JSON form: `{"kind":"xi","p":2,"q":0}`, `{"kind":"moment","m":1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Descriptor {
    Moment { m: u32 },
    Xi { p: u32, q: u32 },
    Psi { p: u32, q: u32 },
}

impl Descriptor {
    pub fn moment(m: u32) -> Self {
        Descriptor::Moment { m }
    }

    pub fn xi(p: u32, q: u32) -> Self {
        Descriptor::Xi { p, q }
    }

    pub fn psi(p: u32, q: u32) -> Self {
        Descriptor::Psi { p, q }
    }

    /// Degree of polynomiality `ℓ`.
    ///
    /// ```
    /// use rotval::valuation::Descriptor;
    /// assert_eq!(Descriptor::xi(2, 1).degree(), 4);
    /// assert_eq!(Descriptor::xi(1, 1).degree(), 2);
    /// assert_eq!(Descriptor::psi(0, 1).degree(), 0);
    /// ```
    pub fn degree(&self) -> u32 {
        match *self {
            Descriptor::Moment { m } => 2 * m,
            Descriptor::Xi { p, q } => {
                if p == 1 {
                    2 * q
                } else {
                    p + 2 * q
                }
            }
            Descriptor::Psi { p, q } => {
                if p + q == 1 {
                    0
                } else {
                    p + q
                }
            }
        }
    }

    /// Degree bound `ℓ + d` of `ε ↦ φ(K + εB)`.
    pub fn epsilon_degree_bound(&self, d: usize) -> usize {
        self.degree() as usize + d
    }

    pub fn is_interior(&self) -> bool {
        matches!(self, Descriptor::Moment { .. })
    }

    pub fn check_dim(&self, d: usize) -> Result<()> {
        if matches!(self, Descriptor::Psi { .. }) && d != 2 {
            return Err(Error::PsiDimension(d));
        }
        Ok(())
    }

    /// `|x|^{2m}` in `d` variables.
    pub fn interior_integrand(&self, d: usize) -> Option<MultiPoly> {
        match *self {
            Descriptor::Moment { m } => Some(MultiPoly::norm_squared(d).pow(m)),
            _ => None,
        }
    }

    /// Boundary integrand `g(s, n)` in the `2d` variables `(s, n)`.
    pub fn boundary_integrand(&self, d: usize) -> Result<Option<MultiPoly>> {
        self.check_dim(d)?;
        let s = |i: usize| MultiPoly::<f64>::var(2 * d, i);
        let n = |i: usize| MultiPoly::<f64>::var(2 * d, d + i);
        let mut sn = MultiPoly::zero(2 * d);
        for i in 0..d {
            sn = &sn + &(&s(i) * &n(i));
        }
        Ok(match *self {
            Descriptor::Moment { .. } => None,
            Descriptor::Xi { p, q } => {
                let mut s2 = MultiPoly::zero(2 * d);
                for i in 0..d {
                    s2 = &s2 + &(&s(i) * &s(i));
                }
                Some(&sn.pow(p) * &s2.pow(q))
            }
            Descriptor::Psi { p, q } => {
                // n' = (-n_2, n_1)
                let snp = &(&s(1) * &n(0)) - &(&s(0) * &n(1));
                Some(&sn.pow(p) * &snp.pow(q))
            }
        })
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::Moment { m } => write!(f, "moment({m})"),
            Descriptor::Xi { p, q } => write!(f, "xi({p},{q})"),
            Descriptor::Psi { p, q } => write!(f, "psi({p},{q})"),
        }
    }
}

/// `φ(P)` for the valuation described by `desc`.
///
/// Moments of lower-dimensional bodies vanish; boundary valuations of
/// flat bodies use the two-sided convention and vanish on bodies of
/// codimension at least two (in particular on points in the plane).
///
/// ```
/// use rotval::geom::Polytope;
/// use rotval::valuation::{evaluate, Descriptor};
/// let sq = Polytope::cube(2);
/// assert!((evaluate(&Descriptor::xi(2, 0), &sq).unwrap() - 8.0).abs() < 1e-12);
/// assert!((evaluate(&Descriptor::xi(1, 1), &sq).unwrap() - 32.0 / 3.0).abs() < 1e-12);
/// ```
pub fn evaluate(desc: &Descriptor, p: &Polytope) -> Result<f64> {
    let d = p.dim();
    desc.check_dim(d)?;
    if p.is_empty() {
        return Ok(0.0);
    }
    match desc {
        Descriptor::Moment { .. } => {
            if !p.is_full_dimensional() {
                return Ok(0.0);
            }
            integrate_polynomial(p, &desc.interior_integrand(d).unwrap())
        }
        _ => {
            if p.intrinsic_dim() == 0 && d >= 2 {
                return Ok(0.0);
            }
            boundary_integral(p, &desc.boundary_integrand(d)?.unwrap())
        }
    }
}

/// A scale for relative errors: `∫ (1 + |s|²)^k` over the boundary (or
/// the interior, for moments), with `2k` at least the integrand degree.
/// It bounds the integral of the absolute integrand.
pub fn magnitude(desc: &Descriptor, p: &Polytope) -> Result<f64> {
    let d = p.dim();
    desc.check_dim(d)?;
    if p.is_empty() {
        return Ok(0.0);
    }
    let deg = match *desc {
        Descriptor::Moment { m } => 2 * m,
        Descriptor::Xi { p, q } => p + 2 * q,
        Descriptor::Psi { p, q } => p + q,
    };
    let k = deg.div_ceil(2);
    match desc {
        Descriptor::Moment { .. } => evaluate(desc, p).map(f64::abs),
        _ => {
            if p.intrinsic_dim() + 1 < d {
                return Ok(0.0);
            }
            let mut s2 = MultiPoly::constant(2 * d, 1.0);
            for i in 0..d {
                s2.add_term(
                    {
                        let mut e = vec![0; 2 * d];
                        e[i] = 2;
                        e
                    },
                    1.0,
                );
            }
            boundary_integral(p, &s2.pow(k))
        }
    }
}
