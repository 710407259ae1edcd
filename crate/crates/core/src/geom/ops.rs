use serde::{Deserialize, Serialize};

use super::{build_polytope, Hyperplane, Polytope};
use crate::error::{Error, Result};
use crate::linalg::{add, axpy, dot, generalized_cross, normalize, orthonormality_defect, solve, sub, Point};
use crate::poly::MultiPoly;

/// `P + Q = {p + q}`; hull of all pairwise vertex sums.
///
/// ```
/// use rotval::geom::{minkowski_sum, Polytope};
/// let a = Polytope::segment(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
/// let b = Polytope::segment(vec![0.0, 0.0], vec![0.0, 1.0]).unwrap();
/// let sq = minkowski_sum(&a, &b).unwrap();
/// assert!((sq.volume() - 1.0).abs() < 1e-15);
/// ```
pub fn minkowski_sum(p: &Polytope, q: &Polytope) -> Result<Polytope> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch(p.dim(), q.dim()));
    }
    if p.is_empty() || q.is_empty() {
        return Ok(Polytope::empty(p.dim()));
    }
    let mut pts = Vec::with_capacity(p.vertices().len() * q.vertices().len());
    for a in p.vertices() {
        for b in q.vertices() {
            pts.push(add(a, b));
        }
    }
    build_polytope(&pts, p.dim())
}

/// The three bodies of a hyperplane cut: `P ∩ H⁺`, `P ∩ H⁻`, `P ∩ H`,
/// where `H⁺ = {⟨x, n⟩ ≥ offset}`.
#[derive(Clone, Debug)]
pub struct Split {
    pub plus: Polytope,
    pub minus: Polytope,
    pub slice: Polytope,
}

fn hull_or_empty(pts: &[Point], dim: usize) -> Result<Polytope> {
    if pts.is_empty() {
        Ok(Polytope::empty(dim))
    } else {
        build_polytope(pts, dim)
    }
}

/// Cuts `P` by `H`. Vertices within tolerance of `H` go to both halves and
/// to the slice.
pub fn split_by_hyperplane(p: &Polytope, h: &Hyperplane) -> Result<Split> {
    let d = p.dim();
    if h.normal.len() != d {
        return Err(Error::DimensionMismatch(h.normal.len(), d));
    }
    if p.is_empty() {
        return Ok(Split {
            plus: p.clone(),
            minus: p.clone(),
            slice: p.clone(),
        });
    }
    let tol = p.tol().max(1e-300);
    let v = p.vertices();
    let sigma: Vec<f64> = v.iter().map(|x| h.signed_distance(x)).collect();
    let snap = |x: &Point| axpy(x, -h.signed_distance(x), &h.normal);

    let mut cut: Vec<Point> = Vec::new();
    for &(a, b) in p.edges() {
        let (sa, sb) = (sigma[a], sigma[b]);
        if (sa < -tol && sb > tol) || (sa > tol && sb < -tol) {
            let t = sa / (sa - sb);
            let x = add(&v[a], &crate::linalg::scale(&sub(&v[b], &v[a]), t));
            cut.push(snap(&x));
        }
    }
    let mut plus_pts = cut.clone();
    let mut minus_pts = cut.clone();
    let mut slice_pts = cut;
    let mut all_plus = true;
    let mut all_minus = true;
    for (x, &s) in v.iter().zip(&sigma) {
        if s >= -tol {
            plus_pts.push(x.clone());
        } else {
            all_plus = false;
        }
        if s <= tol {
            minus_pts.push(x.clone());
        } else {
            all_minus = false;
        }
        if s.abs() <= tol {
            slice_pts.push(snap(x));
        }
    }
    let plus = if all_plus { p.clone() } else { hull_or_empty(&plus_pts, d)? };
    let minus = if all_minus { p.clone() } else { hull_or_empty(&minus_pts, d)? };
    let slice = hull_or_empty(&slice_pts, d)?;
    Ok(Split { plus, minus, slice })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectionMode {
    Slice,
    Project,
}

/// A body living in the affine subspace `{z + V t}`, in intrinsic
/// coordinates `t`.
#[derive(Clone, Debug)]
pub struct Section {
    pub polytope: Polytope,
    pub base: Point,
    pub frame: Vec<Point>,
    pub mode: SectionMode,
}

impl Section {
    /// Pulls an ambient polynomial in `s` back to `t` via `s = z + V t`.
    pub fn pull_back(&self, f: &MultiPoly) -> MultiPoly {
        let k = self.frame.len();
        let subs: Vec<MultiPoly> = (0..self.base.len())
            .map(|j| {
                let coeffs: Vec<f64> = self.frame.iter().map(|v| v[j]).collect();
                MultiPoly::affine(self.base[j], &coeffs)
            })
            .collect();
        let out = f.compose(&subs);
        debug_assert_eq!(out.dim(), k);
        out
    }

    /// Ambient point for intrinsic coordinates `t`.
    pub fn embed(&self, t: &[f64]) -> Point {
        let mut x = self.base.clone();
        for (ti, v) in t.iter().zip(&self.frame) {
            x = axpy(&x, *ti, v);
        }
        x
    }
}

/// Slice of `P` by (or projection of `P` onto) the affine subspace through
/// `z` spanned by the orthonormal `frame`.
pub fn slice_or_project(p: &Polytope, z: &[f64], frame: &[Point], mode: SectionMode) -> Result<Section> {
    let d = p.dim();
    let k = frame.len();
    if k == 0 || k >= d {
        return Err(Error::InvalidArgument(format!(
            "subspace dimension {k} must lie in 1..={}",
            d - 1
        )));
    }
    if z.len() != d || frame.iter().any(|v| v.len() != d) {
        return Err(Error::DimensionMismatch(z.len(), d));
    }
    let defect = orthonormality_defect(frame);
    if defect > 1e-12 {
        return Err(Error::NonOrthonormalFrame(defect));
    }
    let local = |x: &Point| -> Point {
        let c = sub(x, z);
        frame.iter().map(|v| dot(v, &c)).collect()
    };
    let polytope = if p.is_empty() {
        Polytope::empty(k)
    } else {
        match mode {
            SectionMode::Project => {
                let pts: Vec<Point> = p.vertices().iter().map(local).collect();
                build_polytope(&pts, k)?
            }
            SectionMode::Slice => {
                if !p.is_full_dimensional() {
                    return Err(Error::LowerDimensional {
                        dim: d,
                        intrinsic: p.intrinsic_dim(),
                    });
                }
                slice_points(p, z, frame, &local)
                    .map(|pts| hull_or_empty(&pts, k))
                    .unwrap_or_else(|| Ok(Polytope::empty(k)))?
            }
        }
    };
    Ok(Section {
        polytope,
        base: z.to_vec(),
        frame: frame.to_vec(),
        mode,
    })
}

/// Vertices (in `t`) of `{t : A(z + V t) ≤ b}`, or `None` when empty.
fn slice_points(p: &Polytope, z: &[f64], frame: &[Point], local: &dyn Fn(&Point) -> Point) -> Option<Vec<Point>> {
    let d = p.dim();
    let k = frame.len();
    let tol = p.tol().max(1e-300);
    let rows: Vec<(Point, f64)> = p
        .facets()
        .iter()
        .map(|f| {
            let a: Point = frame.iter().map(|v| dot(v, &f.normal)).collect();
            (a, f.offset - dot(&f.normal, z))
        })
        .collect();

    if k == 1 {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (a, b) in &rows {
            if a[0].abs() <= 1e-14 {
                if *b < -tol {
                    return None;
                }
            } else if a[0] > 0.0 {
                hi = hi.min(b / a[0]);
            } else {
                lo = lo.max(b / a[0]);
            }
        }
        if lo > hi + tol {
            return None;
        }
        if lo > hi {
            let m = 0.5 * (lo + hi);
            return Some(vec![vec![m]]);
        }
        return Some(vec![vec![lo], vec![hi]]);
    }

    if k + 1 == d {
        let w = normalize(&generalized_cross(frame))?;
        let v = p.vertices();
        let sigma: Vec<f64> = v.iter().map(|x| dot(&w, &sub(x, z))).collect();
        let mut pts = Vec::new();
        for &(a, b) in p.edges() {
            let (sa, sb) = (sigma[a], sigma[b]);
            if (sa < -tol && sb > tol) || (sa > tol && sb < -tol) {
                let t = sa / (sa - sb);
                let x = add(&v[a], &crate::linalg::scale(&sub(&v[b], &v[a]), t));
                pts.push(local(&x));
            }
        }
        for (x, s) in v.iter().zip(&sigma) {
            if s.abs() <= tol {
                pts.push(local(x));
            }
        }
        return if pts.is_empty() { None } else { Some(pts) };
    }

    // general case: vertex enumeration over k-subsets of constraints
    let m = rows.len();
    let mut pts = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let a: Vec<Point> = idx.iter().map(|&i| rows[i].0.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&i| rows[i].1).collect();
        if let Some(t) = solve(&a, &b, 1e-12) {
            if rows.iter().all(|(ai, bi)| dot(ai, &t) <= bi + tol) {
                pts.push(t);
            }
        }
        let mut i = k;
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            if idx[i] < m - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }
    if pts.is_empty() {
        None
    } else {
        Some(pts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_split_down_the_middle() {
        let sq = Polytope::cube(2);
        let h = Hyperplane::new(vec![1.0, 0.0], 0.0).unwrap();
        let s = split_by_hyperplane(&sq, &h).unwrap();
        assert!((s.plus.volume() - 2.0).abs() < 1e-14);
        assert!((s.minus.volume() - 2.0).abs() < 1e-14);
        assert_eq!(s.slice.intrinsic_dim(), 1);
        assert!((s.slice.volume() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tangent_cut_returns_facet() {
        let sq = Polytope::cube(2);
        let h = Hyperplane::new(vec![1.0, 0.0], 1.0).unwrap();
        let s = split_by_hyperplane(&sq, &h).unwrap();
        assert!((s.minus.volume() - 4.0).abs() < 1e-14);
        assert_eq!(s.plus.intrinsic_dim(), 1);
        assert_eq!(s.slice.intrinsic_dim(), 1);
        let miss = split_by_hyperplane(&sq, &Hyperplane::new(vec![1.0, 0.0], 3.0).unwrap()).unwrap();
        assert!(miss.plus.is_empty() && miss.slice.is_empty());
    }

    #[test]
    fn cube_slice_and_projection() {
        let c = Polytope::cube(3);
        let frame = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let s = slice_or_project(&c, &[0.0; 3], &frame, SectionMode::Slice).unwrap();
        assert!((s.polytope.volume() - 4.0).abs() < 1e-13);
        let p = slice_or_project(&c, &[0.0; 3], &frame, SectionMode::Project).unwrap();
        assert!((p.polytope.volume() - 4.0).abs() < 1e-13);
        let miss = slice_or_project(&c, &[0.0, 0.0, 5.0], &frame, SectionMode::Slice).unwrap();
        assert!(miss.polytope.is_empty());
        let line = slice_or_project(&c, &[0.5, 0.0, 0.0], &[vec![0.0, 0.0, 1.0]], SectionMode::Slice).unwrap();
        assert!((line.polytope.volume() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn four_dim_plane_slice() {
        let c = Polytope::cube(4);
        let frame = vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]];
        let s = slice_or_project(&c, &[0.0, 0.0, 0.3, -0.2], &frame, SectionMode::Slice).unwrap();
        assert!((s.polytope.volume() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_frame() {
        let c = Polytope::cube(3);
        let frame = vec![vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 0.0]];
        assert!(matches!(
            slice_or_project(&c, &[0.0; 3], &frame, SectionMode::Slice),
            Err(Error::NonOrthonormalFrame(_))
        ));
    }
}
