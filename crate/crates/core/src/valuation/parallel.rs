//! Parallel bodies `K + εB` through the face decomposition of `K`.
//!
//! Every face `G` of `K` contributes the patch `{s + r u : s ∈ G, u ∈ U_G}`
//! where `U_G` is the spherical section of the normal cone at `G`. With
//! `c = d - 1 - dim G` the surface element on the patch at distance `r` is
//! `r^c ds dω` and the outer normal at `s + r u` is `u`, so
//!
//! ```text
//! ∫_{∂(K+εB)} g   = Σ_G ε^c ∫_G ∫_{U_G} g(s + εu, u)            dω ds
//! ∫_{K+εB} f      = ∫_K f + Σ_G ∫_G ∫_{U_G} ∫_0^ε f(s + ru) r^c dr dω ds
//! ```
//!
//! Integrals over `G` use quadrature exact for the integrand's degree. In
//! the plane, vertex arcs are integrated in closed form; in space, edge arcs
//! and vertex spherical polygons use Gauss–Legendre based rules.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::{integrate_polynomial, Polytope};
use crate::geom::integrate::fix_normal;
use crate::linalg::{cross3, dot, gram_volume, norm, normalize, scale, sub, Point};
use crate::poly::{MultiPoly, UPoly};
use crate::quadrature::{arc_rule, gauss_legendre_on, spherical_triangle_rule, triangle_rule, trig_monomial_integral};

use super::Descriptor;

/// Integrand of a parallel-body computation.
#[derive(Clone, Debug)]
pub enum Kernel {
    /// `∫_{∂K} ⟨s, n⟩^p |s|^{2q}`
    Xi { p: u32, q: u32 },
    /// `∫_{∂K} ⟨s, n⟩^p ⟨s, n'⟩^q` (plane only)
    Psi { p: u32, q: u32 },
    /// `∫_K (shift + |x|²)^m`
    Moment { m: u32, shift: f64 },
    /// `∫_K f`
    Interior(MultiPoly),
    /// `∫_{∂K} g(s, n)`, `g` in `2d` variables
    Boundary(MultiPoly),
}

impl From<&Descriptor> for Kernel {
    fn from(d: &Descriptor) -> Self {
        match *d {
            Descriptor::Moment { m } => Kernel::Moment { m, shift: 0.0 },
            Descriptor::Xi { p, q } => Kernel::Xi { p, q },
            Descriptor::Psi { p, q } => Kernel::Psi { p, q },
        }
    }
}

impl Kernel {
    pub fn is_interior(&self) -> bool {
        matches!(self, Kernel::Moment { .. } | Kernel::Interior(_))
    }

    fn degree(&self) -> usize {
        match self {
            Kernel::Xi { p, q } => (p + 2 * q) as usize,
            Kernel::Psi { p, q } => (p + q) as usize,
            Kernel::Moment { m, .. } => 2 * *m as usize,
            Kernel::Interior(f) => f.degree().unwrap_or(0) as usize,
            Kernel::Boundary(g) => g.degree().unwrap_or(0) as usize,
        }
    }

    /// The integrand as a polynomial: `f(x)` or `g(s, n)`.
    pub fn polynomial(&self, d: usize) -> Result<MultiPoly> {
        Ok(match self {
            Kernel::Xi { p, q } => Descriptor::xi(*p, *q).boundary_integrand(d)?.unwrap(),
            Kernel::Psi { p, q } => Descriptor::psi(*p, *q).boundary_integrand(d)?.unwrap(),
            Kernel::Moment { m, shift } => {
                (&MultiPoly::constant(d, *shift) + &MultiPoly::norm_squared(d)).pow(*m)
            }
            Kernel::Interior(f) => f.clone(),
            Kernel::Boundary(g) => g.clone(),
        })
    }

    fn check(&self, d: usize) -> Result<()> {
        match self {
            Kernel::Psi { .. } if d != 2 => Err(Error::PsiDimension(d)),
            Kernel::Interior(f) if f.dim() != d => Err(Error::DimensionMismatch(f.dim(), d)),
            Kernel::Boundary(g) if g.dim() != 2 * d => Err(Error::DimensionMismatch(g.dim(), 2 * d)),
            _ => Ok(()),
        }
    }

    /// Boundary kernels: `g(s + εu, u)` as a polynomial in `ε`.
    fn boundary_upoly(&self, s: &[f64], u: &[f64], poly: &MultiPoly) -> UPoly {
        let sigma = dot(s, u);
        match *self {
            Kernel::Xi { p, q } => {
                let rho = dot(s, s);
                let a = UPoly::linear(sigma, 1.0).pow(p);
                let b = UPoly::new(vec![rho, 2.0 * sigma, 1.0]).pow(q);
                a.mul(&b)
            }
            Kernel::Psi { p, q } => {
                let tau = -s[0] * u[1] + s[1] * u[0];
                UPoly::linear(sigma, 1.0).pow(p).scale(tau.powi(q as i32))
            }
            _ => {
                let d = s.len();
                let mut args: Vec<UPoly> = (0..d).map(|k| UPoly::linear(s[k], u[k])).collect();
                args.extend((0..d).map(|k| UPoly::constant(u[k])));
                poly.eval_upoly(&args)
            }
        }
    }

    /// Interior kernels: `f(s + ru)` as a polynomial in `r`.
    fn interior_upoly(&self, s: &[f64], u: &[f64], poly: &MultiPoly) -> UPoly {
        match *self {
            Kernel::Moment { m, shift } => {
                UPoly::new(vec![shift + dot(s, s), 2.0 * dot(s, u), 1.0]).pow(m)
            }
            _ => {
                let args: Vec<UPoly> = (0..s.len()).map(|k| UPoly::linear(s[k], u[k])).collect();
                poly.eval_upoly(&args)
            }
        }
    }
}

/// How circular arcs in the plane are integrated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcMode {
    /// Closed-form trigonometric monomial integrals.
    Exact,
    /// Gauss–Legendre on sub-arcs.
    Quadrature,
}

#[derive(Clone, Debug)]
enum Directions {
    /// Finitely many directions, unit weight each.
    Discrete(Vec<Point>),
    /// Planar arc of angles `[from, to]`.
    Arc { from: f64, to: f64 },
    /// Weighted direction rule.
    Rule(Vec<(Point, f64)>),
}

#[derive(Clone, Debug)]
struct Patch {
    /// Quadrature rule on the face.
    nodes: Vec<(Point, f64)>,
    codim: usize,
    dirs: Directions,
}

fn angle_of(v: &[f64]) -> f64 {
    v[1].atan2(v[0])
}

/// Nodes exact for degree `deg` on the simplex with the given vertices.
fn simplex_nodes(verts: &[&Point], deg: usize) -> Vec<(Point, f64)> {
    match verts.len() {
        1 => vec![(verts[0].clone(), 1.0)],
        2 => {
            let e = sub(verts[1], verts[0]);
            let len = norm(&e);
            gauss_legendre_on(deg / 2 + 1, 0.0, 1.0)
                .into_iter()
                .map(|(t, w)| (crate::linalg::axpy(verts[0], t, &e), w * len))
                .collect()
        }
        3 => {
            let e1 = sub(verts[1], verts[0]);
            let e2 = sub(verts[2], verts[0]);
            let area2 = gram_volume(&[e1.clone(), e2.clone()]);
            triangle_rule(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], deg / 2 + 2)
                .into_iter()
                .map(|(xy, w)| {
                    let p = crate::linalg::axpy(&crate::linalg::axpy(verts[0], xy[0], &e1), xy[1], &e2);
                    (p, w * area2)
                })
                .collect()
        }
        _ => unreachable!("faces of dimension at most 2"),
    }
}

fn decompose(p: &Polytope, deg: usize) -> Result<Vec<Patch>> {
    let d = p.dim();
    let v = p.vertices();
    let r = p.intrinsic_dim();
    let mut patches = Vec::new();
    match d {
        1 => {
            if r == 0 {
                patches.push(Patch {
                    nodes: vec![(v[0].clone(), 1.0)],
                    codim: 0,
                    dirs: Directions::Discrete(vec![vec![1.0], vec![-1.0]]),
                });
            } else {
                for f in p.facets() {
                    patches.push(Patch {
                        nodes: vec![(v[f.vertices[0]].clone(), 1.0)],
                        codim: 0,
                        dirs: Directions::Discrete(vec![f.normal.clone()]),
                    });
                }
            }
        }
        2 => match r {
            0 => patches.push(Patch {
                nodes: vec![(v[0].clone(), 1.0)],
                codim: 1,
                dirs: Directions::Arc { from: 0.0, to: 2.0 * PI },
            }),
            1 => {
                let e = normalize(&sub(&v[1], &v[0])).expect("segment has length");
                let n = vec![e[1], -e[0]];
                let neg: Point = n.iter().map(|x| -x).collect();
                patches.push(Patch {
                    nodes: simplex_nodes(&[&v[0], &v[1]], deg),
                    codim: 0,
                    dirs: Directions::Discrete(vec![n, neg]),
                });
                let phi = angle_of(&e);
                patches.push(Patch {
                    nodes: vec![(v[1].clone(), 1.0)],
                    codim: 1,
                    dirs: Directions::Arc { from: phi - PI / 2.0, to: phi + PI / 2.0 },
                });
                patches.push(Patch {
                    nodes: vec![(v[0].clone(), 1.0)],
                    codim: 1,
                    dirs: Directions::Arc { from: phi + PI / 2.0, to: phi + 1.5 * PI },
                });
            }
            _ => {
                let nf = p.facets().len();
                for f in p.facets() {
                    patches.push(Patch {
                        nodes: simplex_nodes(&[&v[f.vertices[0]], &v[f.vertices[1]]], deg),
                        codim: 0,
                        dirs: Directions::Discrete(vec![f.normal.clone()]),
                    });
                }
                // facet i runs from vertex i to vertex i+1 (counterclockwise)
                for i in 0..nf {
                    let prev = &p.facets()[(i + nf - 1) % nf];
                    let next = &p.facets()[i];
                    debug_assert_eq!(prev.vertices[1], next.vertices[0]);
                    let from = angle_of(&prev.normal);
                    let mut to = angle_of(&next.normal);
                    while to <= from {
                        to += 2.0 * PI;
                    }
                    patches.push(Patch {
                        nodes: vec![(v[next.vertices[0]].clone(), 1.0)],
                        codim: 1,
                        dirs: Directions::Arc { from, to },
                    });
                }
            }
        },
        3 => {
            if r < 3 {
                return Err(Error::LowerDimensional { dim: 3, intrinsic: r });
            }
            let facets = p.facets();
            for f in facets {
                let mut nodes = Vec::new();
                for s in &f.simplices {
                    let pts: Vec<&Point> = s.iter().map(|&i| &v[i]).collect();
                    nodes.extend(simplex_nodes(&pts, deg));
                }
                patches.push(Patch {
                    nodes,
                    codim: 0,
                    dirs: Directions::Discrete(vec![f.normal.clone()]),
                });
            }
            for &(a, b) in p.edges() {
                let adj: Vec<&Point> = facets
                    .iter()
                    .filter(|f| f.vertices.contains(&a) && f.vertices.contains(&b))
                    .map(|f| &f.normal)
                    .collect();
                if adj.len() != 2 {
                    return Err(Error::Degenerate(format!(
                        "edge ({a},{b}) has {} adjacent facets",
                        adj.len()
                    )));
                }
                let (n1, n2) = (adj[0], adj[1]);
                let c = dot(n1, n2);
                let e2 = normalize(&sub(n2, &scale(n1, c))).expect("distinct facet normals");
                let angle = norm(&cross3(n1, n2)).atan2(c);
                patches.push(Patch {
                    nodes: simplex_nodes(&[&v[a], &v[b]], deg),
                    codim: 1,
                    dirs: Directions::Rule(arc_rule(n1, &e2, angle, deg)),
                });
            }
            for (vi, x) in v.iter().enumerate() {
                let normals: Vec<&Point> = facets
                    .iter()
                    .filter(|f| f.vertices.contains(&vi))
                    .map(|f| &f.normal)
                    .collect();
                let mut axis = vec![0.0; 3];
                for n in &normals {
                    for k in 0..3 {
                        axis[k] += n[k];
                    }
                }
                let axis = normalize(&axis).ok_or_else(|| Error::Degenerate("vertex cone".into()))?;
                let (e1, e2) = crate::quadrature::tangent_basis(&axis);
                let mut ring: Vec<&Point> = normals.clone();
                ring.sort_by(|a, b| {
                    let ta = dot(a, &e2).atan2(dot(a, &e1));
                    let tb = dot(b, &e2).atan2(dot(b, &e1));
                    ta.total_cmp(&tb)
                });
                let mut rule = Vec::new();
                for k in 0..ring.len() {
                    let (a, b) = (ring[k], ring[(k + 1) % ring.len()]);
                    rule.extend(spherical_triangle_rule(&axis, a, b, deg));
                }
                patches.push(Patch {
                    nodes: vec![(x.clone(), 1.0)],
                    codim: 2,
                    dirs: Directions::Rule(rule),
                });
            }
        }
        _ => return Err(Error::UnsupportedDimension(d, "1..=3 for parallel bodies")),
    }
    Ok(patches)
}

/// `∫_0^ε r^c q(r) dr` as a polynomial in `ε`.
fn radial_integral(q: &UPoly, c: usize) -> UPoly {
    let mut out = vec![0.0; q.len() + c + 1];
    for (k, a) in q.coeffs.iter().enumerate() {
        out[k + c + 1] = a / (k + c + 1) as f64;
    }
    UPoly::new(out)
}

fn direction_rule(dirs: &Directions, deg: usize) -> Vec<(Point, f64)> {
    match dirs {
        Directions::Discrete(us) => us.iter().map(|u| (u.clone(), 1.0)).collect(),
        Directions::Rule(r) => r.clone(),
        Directions::Arc { from, to } => {
            let e1 = vec![from.cos(), from.sin()];
            let e2 = vec![-from.sin(), from.cos()];
            arc_rule(&e1, &e2, to - from, deg)
        }
    }
}

/// Closed-form integral of `Q(ε, u_1, u_2)` over an arc, for a vertex patch.
fn exact_vertex_arc(kernel: &Kernel, poly: &MultiPoly, x: &[f64], codim: usize, from: f64, to: f64) -> UPoly {
    // substitute s = x + t·u (boundary: also n = u), variables (t, u1, u2)
    let t = MultiPoly::<f64>::var(3, 0);
    let u1 = MultiPoly::<f64>::var(3, 1);
    let u2 = MultiPoly::<f64>::var(3, 2);
    let s1 = &MultiPoly::constant(3, x[0]) + &(&t * &u1);
    let s2 = &MultiPoly::constant(3, x[1]) + &(&t * &u2);
    let q = if kernel.is_interior() {
        poly.compose(&[s1, s2])
    } else {
        poly.compose(&[s1, s2, u1, u2])
    };
    let mut out = UPoly::zero();
    for (e, &c) in q.terms() {
        let ang = trig_monomial_integral(e[1], e[2], from, to);
        let k = e[0] as usize;
        let (power, coef) = if kernel.is_interior() {
            (k + codim + 1, c * ang / (k + codim + 1) as f64)
        } else {
            (k + codim, c * ang)
        };
        let mut mono = vec![0.0; power + 1];
        mono[power] = coef;
        out.add_assign(&UPoly::new(mono));
    }
    out
}

/// Exact-in-ε expansion of the kernel over `K + εB`.
pub fn parallel_polynomial(kernel: &Kernel, p: &Polytope, arcs: ArcMode) -> Result<UPoly> {
    let d = p.dim();
    kernel.check(d)?;
    if p.is_empty() {
        return Ok(UPoly::zero());
    }
    let deg = kernel.degree();
    let poly = kernel.polynomial(d)?;
    let patches = decompose(p, deg)?;
    let mut total = UPoly::zero();
    if kernel.is_interior() && p.is_full_dimensional() {
        total.add_assign(&UPoly::constant(integrate_polynomial(p, &poly)?));
    }
    for patch in &patches {
        if let (ArcMode::Exact, Directions::Arc { from, to }) = (arcs, &patch.dirs) {
            for (x, w) in &patch.nodes {
                let q = exact_vertex_arc(kernel, &poly, x, patch.codim, *from, *to);
                total.add_scaled(*w, &q);
            }
            continue;
        }
        let rule = direction_rule(&patch.dirs, deg);
        let mut acc = UPoly::zero();
        for (x, w) in &patch.nodes {
            for (u, wu) in &rule {
                let q = if kernel.is_interior() {
                    kernel.interior_upoly(x, u, &poly)
                } else {
                    kernel.boundary_upoly(x, u, &poly)
                };
                acc.add_scaled(w * wu, &q);
            }
        }
        if kernel.is_interior() {
            total.add_assign(&radial_integral(&acc, patch.codim));
        } else {
            total.add_assign(&acc.shift(patch.codim));
        }
    }
    Ok(total)
}

/// Value of the kernel on `K + εB` for one `ε`, evaluating the integrand
/// pointwise on the patches (radial integrals by Gauss–Legendre).
pub fn parallel_value(kernel: &Kernel, p: &Polytope, eps: f64) -> Result<f64> {
    let d = p.dim();
    kernel.check(d)?;
    if eps < 0.0 {
        return Err(Error::NegativeRadius(eps));
    }
    if p.is_empty() {
        return Ok(0.0);
    }
    let deg = kernel.degree();
    let poly = kernel.polynomial(d)?;
    let patches = decompose(p, deg)?;
    let mut total = 0.0;
    if kernel.is_interior() && p.is_full_dimensional() {
        total += integrate_polynomial(p, &poly)?;
    }
    if eps == 0.0 {
        return Ok(total + if kernel.is_interior() { 0.0 } else { boundary_at_zero(&patches, &poly) });
    }
    for patch in &patches {
        let rule = direction_rule(&patch.dirs, deg);
        let c = patch.codim;
        let radial = gauss_legendre_on((deg + c) / 2 + 2, 0.0, eps);
        for (x, w) in &patch.nodes {
            for (u, wu) in &rule {
                if kernel.is_interior() {
                    let mut line = 0.0;
                    for (r, wr) in &radial {
                        let y: Point = x.iter().zip(u).map(|(a, b)| a + r * b).collect();
                        line += wr * r.powi(c as i32) * poly.eval(&y);
                    }
                    total += w * wu * line;
                } else {
                    let mut y: Point = x.iter().zip(u).map(|(a, b)| a + eps * b).collect();
                    y.extend_from_slice(u);
                    total += w * wu * eps.powi(c as i32) * poly.eval(&y);
                }
            }
        }
    }
    Ok(total)
}

fn boundary_at_zero(patches: &[Patch], poly: &MultiPoly) -> f64 {
    let mut total = 0.0;
    for patch in patches.iter().filter(|p| p.codim == 0) {
        let rule = direction_rule(&patch.dirs, 0);
        for (x, w) in &patch.nodes {
            for (u, wu) in &rule {
                let mut y = x.clone();
                y.extend_from_slice(u);
                total += w * wu * poly.eval(&y);
            }
        }
    }
    total
}

/// `Σ_G vol(G) ∫_{U_G} ⟨x, u⟩^p du` over faces `G` of codimension `codim`,
/// as a polynomial in `x`.
pub(crate) fn normal_pairing(k: &Polytope, codim: usize, p: u32) -> Result<MultiPoly> {
    let d = k.dim();
    let mut xu = MultiPoly::zero(2 * d);
    for i in 0..d {
        xu = &xu + &(&MultiPoly::var(2 * d, i) * &MultiPoly::var(2 * d, d + i));
    }
    let h = xu.pow(p);
    let mut out = MultiPoly::zero(d);
    if k.is_empty() {
        return Ok(out);
    }
    for patch in decompose(k, p as usize)?.iter().filter(|q| q.codim == codim) {
        let vol: f64 = patch.nodes.iter().map(|(_, w)| w).sum();
        if let Directions::Arc { from, to } = patch.dirs {
            for (e, &c) in h.terms() {
                let ang = trig_monomial_integral(e[2], e[3], from, to);
                out.add_term(e[..2].to_vec(), vol * c * ang);
            }
            continue;
        }
        for (u, wu) in direction_rule(&patch.dirs, p as usize) {
            out = &out + &fix_normal(&h, &u).scale(&(vol * wu));
        }
    }
    Ok(out.prune(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::build_polytope;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn square_volume_expansion() {
        let sq = Polytope::cube(2);
        for mode in [ArcMode::Exact, ArcMode::Quadrature] {
            let c = parallel_polynomial(&Kernel::Moment { m: 0, shift: 0.0 }, &sq, mode).unwrap();
            assert!(close(c.coeff(0), 4.0, 1e-14));
            assert!(close(c.coeff(1), 8.0, 1e-14));
            assert!(close(c.coeff(2), PI, 1e-14));
        }
    }

    #[test]
    fn square_second_moment_expansion() {
        let sq = Polytope::cube(2);
        let c = parallel_polynomial(&Kernel::Moment { m: 1, shift: 0.0 }, &sq, ArcMode::Exact).unwrap();
        // prisms give 8/3 of the cubic term, corner cross terms 16/3
        let want = [8.0 / 3.0, 32.0 / 3.0, 8.0 + 2.0 * PI, 8.0, PI / 2.0];
        for (k, w) in want.iter().enumerate() {
            assert!(close(c.coeff(k), *w, 1e-13), "k={k}: {} vs {w}", c.coeff(k));
        }
    }

    #[test]
    fn cube_volume_expansion() {
        let c = parallel_polynomial(&Kernel::Moment { m: 0, shift: 0.0 }, &Polytope::cube(3), ArcMode::Exact).unwrap();
        let want = [8.0, 24.0, 6.0 * PI, 4.0 * PI / 3.0];
        for (k, w) in want.iter().enumerate() {
            assert!(close(c.coeff(k), *w, 1e-12), "k={k}: {} vs {w}", c.coeff(k));
        }
    }

    #[test]
    fn vertex_cones_cover_the_sphere() {
        let mut rng = crate::random::rng_for(11, 0);
        for _ in 0..5 {
            let p = crate::random::random_polytope(3, 9, &mut rng);
            let c = parallel_polynomial(&Kernel::Moment { m: 0, shift: 0.0 }, &p, ArcMode::Exact).unwrap();
            assert!((c.coeff(3) - 4.0 * PI / 3.0).abs() < 1e-12);
            assert!((c.coeff(0) - p.volume()).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_planar_bodies() {
        let seg = build_polytope(&[vec![0.0, 0.0], vec![2.0, 0.0]], 2).unwrap();
        let vol = parallel_polynomial(&Kernel::Moment { m: 0, shift: 0.0 }, &seg, ArcMode::Exact).unwrap();
        assert!(close(vol.coeff(1), 4.0, 1e-14) && close(vol.coeff(2), PI, 1e-14));
        let per = parallel_polynomial(&Kernel::Xi { p: 0, q: 0 }, &seg, ArcMode::Exact).unwrap();
        assert!(close(per.coeff(0), 4.0, 1e-14) && close(per.coeff(1), 2.0 * PI, 1e-14));
        let pt = build_polytope(&[vec![1.0, 1.0]], 2).unwrap();
        let disk = parallel_polynomial(&Kernel::Moment { m: 0, shift: 0.0 }, &pt, ArcMode::Exact).unwrap();
        assert!(close(disk.coeff(2), PI, 1e-14));
    }

    #[test]
    fn interval_expansion() {
        let iv = build_polytope(&[vec![-0.5], vec![2.0]], 1).unwrap();
        let c = parallel_polynomial(&Kernel::Moment { m: 1, shift: 0.0 }, &iv, ArcMode::Exact).unwrap();
        // ((2+ε)^3 + (0.5+ε)^3)/3
        let want = [(8.0 + 0.125) / 3.0, 4.0 + 0.25, 2.0 + 0.5, 2.0 / 3.0];
        for (k, w) in want.iter().enumerate() {
            assert!(close(c.coeff(k), *w, 1e-14));
        }
    }

    #[test]
    fn numeric_value_matches_expansion() {
        let tri = build_polytope(&[vec![0.1, -0.2], vec![1.3, 0.1], vec![0.2, 0.9]], 2).unwrap();
        for k in [Kernel::Moment { m: 2, shift: 0.0 }, Kernel::Xi { p: 2, q: 1 }, Kernel::Psi { p: 3, q: 2 }] {
            let c = parallel_polynomial(&k, &tri, ArcMode::Exact).unwrap();
            for eps in [0.0, 0.3, 1.1] {
                let v = parallel_value(&k, &tri, eps).unwrap();
                assert!(close(c.eval(eps), v, 1e-12), "{k:?} eps={eps}");
            }
        }
        let tet = build_polytope(
            &[vec![0.0, 0.0, 0.0], vec![1.0, 0.1, 0.0], vec![0.2, 1.0, 0.1], vec![0.1, 0.3, 1.2]],
            3,
        )
        .unwrap();
        let k = Kernel::Xi { p: 2, q: 1 };
        let c = parallel_polynomial(&k, &tet, ArcMode::Exact).unwrap();
        let v = parallel_value(&k, &tet, 0.7).unwrap();
        assert!(close(c.eval(0.7), v, 1e-11));
    }
}
