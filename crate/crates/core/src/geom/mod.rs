//! Convex polytopes in dimensions 1 to 4 and exact integration over them.
//!
//! A [`Polytope`] is built from a point cloud. The hull is computed inside
//! the affine hull of the points, so lower-dimensional bodies (for example
//! the slice of a polygon by a line) are first-class values carrying their
//! intrinsic dimension, facet structure and triangulation.

mod hull;
pub(crate) mod integrate;
mod montecarlo;
mod ops;

pub use integrate::{
    boundary_integral, integrate_over_simplex, integrate_polynomial, integrate_polynomial_exact,
    simplex_monomial_integral, Field,
};
pub use montecarlo::{monte_carlo_oracle, McEstimate, McTarget};
pub use ops::{minkowski_sum, slice_or_project, split_by_hyperplane, Section, SectionMode, Split};
pub(crate) use hull::convex_hull_2d;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dist, dot, factorial, gram_volume, mat_vec, norm, sub, Matrix, Point};

/// Default relative tolerance for geometric predicates (scaled by the
/// diameter of the input).
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    /// Outward unit normal, in ambient coordinates. For lower-dimensional
    /// bodies it lies in the direction space of the affine hull.
    pub normal: Point,
    /// Support value `h = max ⟨v, normal⟩`.
    pub offset: f64,
    pub vertices: Vec<usize>,
    /// Simplices (vertex indices) covering the facet.
    pub simplices: Vec<Vec<usize>>,
    /// `(k-1)`-dimensional measure, `k` the intrinsic dimension.
    pub measure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: Point,
    pub offset: f64,
}

impl Hyperplane {
    /// Normalizes `normal` and rescales `offset` accordingly.
    pub fn new(normal: Point, offset: f64) -> Result<Self> {
        let n = norm(&normal);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidArgument("hyperplane normal must be nonzero".into()));
        }
        Ok(Self {
            normal: normal.iter().map(|x| x / n).collect(),
            offset: offset / n,
        })
    }

    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }

    pub fn validate(&self) -> Result<()> {
        let dev = (norm(&self.normal) - 1.0).abs();
        if dev > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "hyperplane normal is not unit (deviation {dev:e})"
            )));
        }
        Ok(())
    }
}

/// Wire format of a polytope: dimension plus a point list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeSpec {
    pub dim: usize,
    pub vertices: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolytopeSpec", into = "PolytopeSpec")]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Point>,
    intrinsic_dim: usize,
    empty: bool,
    facets: Vec<Facet>,
    triangulation: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    origin: Point,
    basis: Vec<Point>,
    volume: f64,
    tol: f64,
}

impl TryFrom<PolytopeSpec> for Polytope {
    type Error = Error;
    fn try_from(s: PolytopeSpec) -> Result<Self> {
        if s.vertices.is_empty() {
            return Ok(Polytope::empty(s.dim));
        }
        build_polytope(&s.vertices, s.dim)
    }
}

impl From<Polytope> for PolytopeSpec {
    fn from(p: Polytope) -> Self {
        PolytopeSpec {
            dim: p.dim,
            vertices: p.vertices,
        }
    }
}

/// Convex hull of `points` in `R^dim`.
///
/// ```
/// use rotval::geom::build_polytope;
/// let sq = build_polytope(
///     &[vec![-1.0, -1.0], vec![1.0, -1.0], vec![1.0, 1.0], vec![-1.0, 1.0], vec![0.0, 0.0]],
///     2,
/// ).unwrap();
/// assert_eq!(sq.vertices().len(), 4);
/// assert_eq!(sq.facets().len(), 4);
/// assert!((sq.volume() - 4.0).abs() < 1e-12);
/// ```
pub fn build_polytope(points: &[Point], dim: usize) -> Result<Polytope> {
    build_polytope_with_tol(points, dim, DEFAULT_TOL)
}

/// As [`build_polytope`] with an explicit relative tolerance.
pub fn build_polytope_with_tol(points: &[Point], dim: usize, rel_tol: f64) -> Result<Polytope> {
    if !(1..=4).contains(&dim) {
        return Err(Error::UnsupportedDimension(dim, "1..=4"));
    }
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (i, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(Error::CoordinateMismatch {
                index: i,
                expected: dim,
                found: p.len(),
            });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("point {i} has non-finite coordinates")));
        }
    }

    let mut lo = points[0].clone();
    let mut hi = points[0].clone();
    for p in points {
        for k in 0..dim {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let diam = dist(&lo, &hi);
    let tol = rel_tol * diam.max(f64::MIN_POSITIVE);

    let mut pts: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        if !pts.iter().any(|q| dist(p, q) <= tol) {
            pts.push(p.clone());
        }
    }

    let n = pts.len();
    let mut centroid = vec![0.0; dim];
    for p in &pts {
        for k in 0..dim {
            centroid[k] += p[k] / n as f64;
        }
    }
    let (r, basis) = if n == 1 {
        (0, vec![])
    } else {
        affine_frame(&pts, &centroid, tol)
    };

    let local: Vec<Point> = if r == dim {
        pts.clone()
    } else {
        pts.iter()
            .map(|p| {
                let c = sub(p, &centroid);
                basis.iter().map(|b| dot(b, &c)).collect()
            })
            .collect()
    };
    let lh = hull::hull(&local, r, tol);
    Ok(assemble(dim, r, &pts, &lh, centroid, basis, tol))
}

/// Orthonormal basis of the direction space of the affine hull.
fn affine_frame(pts: &[Point], centroid: &[f64], tol: f64) -> (usize, Vec<Point>) {
    let dim = centroid.len();
    let m = DMatrix::from_fn(pts.len(), dim, |i, j| pts[i][j] - centroid[j]);
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let r = order
        .iter()
        .filter(|&&i| svd.singular_values[i] > tol)
        .count();
    let basis: Vec<Point> = order[..r]
        .iter()
        .map(|&i| (0..dim).map(|j| vt[(i, j)]).collect())
        .collect();
    // the singular vectors are not always orthonormal to working precision
    let basis = crate::linalg::orthonormalize(&basis).unwrap_or(basis);
    (r, basis)
}

fn simplex_volume(pts: &[&Point]) -> f64 {
    let k = pts.len() - 1;
    let edges: Vec<Point> = pts[1..].iter().map(|p| sub(p, pts[0])).collect();
    gram_volume(&edges) / factorial(k)
}

fn assemble(
    dim: usize,
    r: usize,
    pts: &[Point],
    lh: &hull::LocalHull,
    origin: Point,
    basis: Vec<Point>,
    tol: f64,
) -> Polytope {
    let mut map = vec![usize::MAX; pts.len()];
    let vertices: Vec<Point> = lh
        .vertices
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            map[i] = k;
            pts[i].clone()
        })
        .collect();
    let nv = vertices.len();
    let to_ambient = |n_loc: &Point| -> Point {
        if r == dim {
            n_loc.clone()
        } else {
            let mut out = vec![0.0; dim];
            for (c, b) in n_loc.iter().zip(&basis) {
                for k in 0..dim {
                    out[k] += c * b[k];
                }
            }
            out
        }
    };

    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut facets: Vec<Facet> = Vec::with_capacity(lh.facets.len());
    for lf in &lh.facets {
        let fv: Vec<usize> = lf.vertices.iter().map(|&i| map[i]).collect();
        let normal = to_ambient(&lf.normal);
        let offset = fv.iter().map(|&v| dot(&normal, &vertices[v])).sum::<f64>() / fv.len() as f64;
        let simplices: Vec<Vec<usize>> = match r {
            1 => vec![fv.clone()],
            2 => vec![fv.clone()],
            3 => {
                for k in 0..fv.len() {
                    let (a, b) = (fv[k], fv[(k + 1) % fv.len()]);
                    edges.push((a.min(b), a.max(b)));
                }
                (1..fv.len() - 1).map(|k| vec![fv[0], fv[k], fv[k + 1]]).collect()
            }
            _ => {
                let fpts: Vec<Point> = fv.iter().map(|&v| vertices[v].clone()).collect();
                let sub_p = build_polytope_with_tol(&fpts, dim, tol / diam_of(&fpts).max(f64::MIN_POSITIVE))
                    .expect("facet of a valid hull");
                let back: Vec<usize> = sub_p
                    .vertices
                    .iter()
                    .map(|v| {
                        fv.iter()
                            .copied()
                            .min_by(|&a, &b| dist(&vertices[a], v).total_cmp(&dist(&vertices[b], v)))
                            .unwrap()
                    })
                    .collect();
                for &(a, b) in &sub_p.edges {
                    let (a, b) = (back[a], back[b]);
                    edges.push((a.min(b), a.max(b)));
                }
                sub_p
                    .triangulation
                    .iter()
                    .map(|s| s.iter().map(|&i| back[i]).collect())
                    .collect()
            }
        };
        let measure = simplices
            .iter()
            .map(|s| {
                let p: Vec<&Point> = s.iter().map(|&i| &vertices[i]).collect();
                simplex_volume(&p)
            })
            .sum();
        facets.push(Facet {
            normal,
            offset,
            vertices: fv,
            simplices,
            measure,
        });
    }

    let triangulation: Vec<Vec<usize>> = match r {
        0 => vec![vec![0]],
        1 => vec![vec![0, 1]],
        2 => (1..nv - 1).map(|k| vec![0, k, k + 1]).collect(),
        _ => {
            let mut t = Vec::new();
            for f in &facets {
                if f.vertices.contains(&0) {
                    continue;
                }
                for s in &f.simplices {
                    let mut simplex = vec![0];
                    simplex.extend_from_slice(s);
                    t.push(simplex);
                }
            }
            t
        }
    };
    match r {
        1 => edges.push((0, 1)),
        2 => {
            for k in 0..nv {
                let (a, b) = (k, (k + 1) % nv);
                edges.push((a.min(b), a.max(b)));
            }
        }
        _ => {}
    }
    edges.sort_unstable();
    edges.dedup();

    let volume = triangulation
        .iter()
        .map(|s| {
            let p: Vec<&Point> = s.iter().map(|&i| &vertices[i]).collect();
            simplex_volume(&p)
        })
        .sum();

    Polytope {
        dim,
        vertices,
        intrinsic_dim: r,
        empty: false,
        facets,
        triangulation,
        edges,
        origin,
        basis,
        volume,
        tol,
    }
}

fn diam_of(pts: &[Point]) -> f64 {
    let mut d = 0.0f64;
    for a in pts {
        for b in pts {
            d = d.max(dist(a, b));
        }
    }
    d
}

impl Polytope {
    /// The empty body in `R^dim`.
    pub fn empty(dim: usize) -> Self {
        Polytope {
            dim,
            vertices: vec![],
            intrinsic_dim: 0,
            empty: true,
            facets: vec![],
            triangulation: vec![],
            edges: vec![],
            origin: vec![0.0; dim],
            basis: vec![],
            volume: 0.0,
            tol: 0.0,
        }
    }

    /// Axis-parallel box `[lo_1, hi_1] × ... × [lo_d, hi_d]`.
    pub fn cuboid(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let d = lo.len();
        let pts: Vec<Point> = (0..1usize << d)
            .map(|mask| {
                (0..d)
                    .map(|k| if mask >> k & 1 == 1 { hi[k] } else { lo[k] })
                    .collect()
            })
            .collect();
        build_polytope(&pts, d)
    }

    /// `[-1, 1]^d`
    pub fn cube(d: usize) -> Self {
        Self::cuboid(&vec![-1.0; d], &vec![1.0; d]).expect("cube is valid")
    }

    /// Segment `[a, b]`.
    pub fn segment(a: Point, b: Point) -> Result<Self> {
        let d = a.len();
        build_polytope(&[a, b], d)
    }

    /// Regular `n`-gon with circumradius `r` centered at the origin.
    pub fn regular_polygon(n: usize, r: f64, phase: f64) -> Self {
        let pts: Vec<Point> = (0..n)
            .map(|k| {
                let t = phase + 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                vec![r * t.cos(), r * t.sin()]
            })
            .collect();
        build_polytope(&pts, 2).expect("regular polygon is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    /// Affine dimension of the body (0 for the empty body).
    pub fn intrinsic_dim(&self) -> usize {
        self.intrinsic_dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        !self.empty && self.intrinsic_dim == self.dim
    }

    /// Vertices; in dimension 2 they are listed counterclockwise.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn triangulation(&self) -> &[Vec<usize>] {
        &self.triangulation
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Intrinsic volume of the body in its own affine hull.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Absolute tolerance used for this body's predicates.
    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Orthonormal basis of the affine hull's direction space.
    pub fn frame(&self) -> (&[f64], &[Point]) {
        (&self.origin, &self.basis)
    }

    /// Unit normal of a flat body (`intrinsic_dim = dim - 1`).
    pub fn flat_normal(&self) -> Option<Point> {
        if self.empty || self.intrinsic_dim + 1 != self.dim {
            return None;
        }
        if self.dim == 1 {
            return Some(vec![1.0]);
        }
        let mut rows = self.basis.clone();
        // complete the basis: the generalized cross product is orthogonal to all rows
        let c = crate::linalg::generalized_cross(&std::mem::take(&mut rows));
        crate::linalg::normalize(&c)
    }

    pub fn support(&self, u: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(v, u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn centroid_of_vertices(&self) -> Point {
        let n = self.vertices.len().max(1) as f64;
        let mut c = vec![0.0; self.dim];
        for v in &self.vertices {
            for k in 0..self.dim {
                c[k] += v[k] / n;
            }
        }
        c
    }

    /// Largest distance from the vertex centroid to a vertex.
    pub fn circumradius(&self) -> f64 {
        let c = self.centroid_of_vertices();
        self.vertices.iter().map(|v| dist(v, &c)).fold(0.0, f64::max)
    }

    /// Largest vertex norm.
    pub fn max_norm(&self) -> f64 {
        self.vertices.iter().map(|v| norm(v)).fold(0.0, f64::max)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if self.empty {
            return false;
        }
        if self.intrinsic_dim < self.dim {
            let c = sub(x, &self.origin);
            let mut proj = vec![0.0; self.dim];
            for b in &self.basis {
                let t = dot(b, &c);
                for k in 0..self.dim {
                    proj[k] += t * b[k];
                }
            }
            if dist(&c, &proj) > tol {
                return false;
            }
            if self.intrinsic_dim == 0 {
                return dist(x, &self.vertices[0]) <= tol;
            }
        }
        self.facets
            .iter()
            .all(|f| dot(&f.normal, x) <= f.offset + tol)
    }

    /// Indices of facets containing vertex `v`.
    pub fn facets_at_vertex(&self, v: usize) -> Vec<usize> {
        (0..self.facets.len())
            .filter(|&f| self.facets[f].vertices.contains(&v))
            .collect()
    }

    /// `P + t`
    pub fn translate(&self, t: &[f64]) -> Polytope {
        if self.empty {
            return self.clone();
        }
        let mut p = self.clone();
        for v in p.vertices.iter_mut() {
            for k in 0..self.dim {
                v[k] += t[k];
            }
        }
        for k in 0..self.dim {
            p.origin[k] += t[k];
        }
        for f in p.facets.iter_mut() {
            f.offset += dot(&f.normal, t);
        }
        p
    }

    /// `λ P` for `λ > 0`.
    pub fn scale(&self, lambda: f64) -> Result<Polytope> {
        if self.empty {
            return Ok(self.clone());
        }
        let pts: Vec<Point> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| x * lambda).collect())
            .collect();
        build_polytope(&pts, self.dim)
    }

    /// Image under a linear map given as rows.
    pub fn transform(&self, m: &Matrix) -> Result<Polytope> {
        if self.empty {
            return Ok(self.clone());
        }
        let pts: Vec<Point> = self.vertices.iter().map(|v| mat_vec(m, v)).collect();
        build_polytope(&pts, self.dim)
    }

    /// Recomputes the hull volume from facets as `Σ h_F·|F| / dim`
    /// after shifting to the vertex centroid.
    pub fn facet_pyramid_volume(&self) -> f64 {
        if !self.is_full_dimensional() {
            return 0.0;
        }
        let c = self.centroid_of_vertices();
        self.facets
            .iter()
            .map(|f| (f.offset - dot(&f.normal, &c)) * f.measure)
            .sum::<f64>()
            / self.dim as f64
    }

    pub fn spec(&self) -> PolytopeSpec {
        PolytopeSpec {
            dim: self.dim,
            vertices: self.vertices.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_with_interior_point() {
        let p = build_polytope(
            &[
                vec![-1.0, -1.0],
                vec![1.0, -1.0],
                vec![1.0, 1.0],
                vec![-1.0, 1.0],
                vec![0.0, 0.0],
            ],
            2,
        )
        .unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.facets().len(), 4);
        assert_eq!(p.intrinsic_dim(), 2);
        assert!(!p.vertices().contains(&vec![0.0, 0.0]));
    }

    #[test]
    fn triangle_and_collinear_segment() {
        let t = build_polytope(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]], 2).unwrap();
        assert_eq!(t.facets().len(), 3);
        assert!((t.volume() - 0.5).abs() < 1e-15);
        let s = build_polytope(
            &[vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]],
            3,
        )
        .unwrap();
        assert_eq!(s.intrinsic_dim(), 1);
        assert_eq!(s.vertices().len(), 2);
        assert!((s.volume() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cube_structure() {
        let c = Polytope::cube(3);
        assert_eq!(c.vertices().len(), 8);
        assert_eq!(c.facets().len(), 6);
        assert_eq!(c.edges().len(), 12);
        assert!((c.volume() - 8.0).abs() < 1e-12);
        for f in c.facets() {
            assert!((f.measure - 4.0).abs() < 1e-12);
            assert!((norm(&f.normal) - 1.0).abs() < 1e-12);
        }
        assert!((c.facet_pyramid_volume() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn tesseract() {
        let c = Polytope::cube(4);
        assert_eq!(c.vertices().len(), 16);
        assert_eq!(c.facets().len(), 8);
        assert_eq!(c.edges().len(), 32);
        assert!((c.volume() - 16.0).abs() < 1e-11);
    }

    #[test]
    fn flat_square_in_space() {
        let p = build_polytope(
            &[
                vec![0.0, 0.0, 1.0],
                vec![1.0, 0.0, 1.0],
                vec![1.0, 1.0, 1.0],
                vec![0.0, 1.0, 1.0],
            ],
            3,
        )
        .unwrap();
        assert_eq!(p.intrinsic_dim(), 2);
        assert_eq!(p.facets().len(), 4);
        assert!((p.volume() - 1.0).abs() < 1e-12);
        let n = p.flat_normal().unwrap();
        assert!((n[2].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert_eq!(build_polytope(&[], 2), Err(Error::EmptyInput));
        assert!(matches!(
            build_polytope(&[vec![0.0, 0.0], vec![1.0]], 2),
            Err(Error::CoordinateMismatch { index: 1, .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"dim": 2, "vertices": [[0.0,0.0],[1.0,0.0],[0.0,1.0]]}"#;
        let p: Polytope = serde_json::from_str(s).unwrap();
        assert_eq!(p.facets().len(), 3);
        let back = serde_json::to_string(&p).unwrap();
        let q: Polytope = serde_json::from_str(&back).unwrap();
        assert_eq!(p.vertices(), q.vertices());
    }
}
