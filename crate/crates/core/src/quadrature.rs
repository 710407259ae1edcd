//! Quadrature rules: Gauss–Legendre, collapsed rules on triangles, arcs and
//! spherical triangles, plus closed-form trigonometric monomial integrals.

use std::f64::consts::PI;

use crate::linalg::{add, axpy, cross3, dot, norm, normalize, scale, Point};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        dp = if d != 0.0 { d } else { dp };
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))`
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    x.iter().zip(&w).map(|(xi, wi)| (c + h * xi, h * wi)).collect()
}

/// Collapsed (Duffy) product rule on the planar triangle `abc`, exact for
/// polynomials of degree `2n - 2`.
pub fn triangle_rule(a: &[f64], b: &[f64], c: &[f64], n: usize) -> Vec<(Point, f64)> {
    let e1 = [b[0] - a[0], b[1] - a[1]];
    let e2 = [c[0] - b[0], c[1] - b[1]];
    let jac = (e1[0] * e2[1] - e1[1] * e2[0]).abs();
    let gu = gauss_legendre_on(n + 1, 0.0, 1.0);
    let gv = gauss_legendre_on(n, 0.0, 1.0);
    let mut out = Vec::with_capacity(gu.len() * gv.len());
    for &(u, wu) in &gu {
        for &(v, wv) in &gv {
            let p = vec![
                a[0] + u * (e1[0] + v * e2[0]),
                a[1] + u * (e1[1] + v * e2[1]),
            ];
            out.push((p, wu * wv * u * jac));
        }
    }
    out
}

/// `∫_{t0}^{t1} cos^a(θ) sin^b(θ) dθ`, in closed form via the exponential
/// expansion of both factors.
pub fn trig_monomial_integral(a: u32, b: u32, t0: f64, t1: f64) -> f64 {
    // cos^a sin^b = 2^{-a} (2i)^{-b} Σ_k Σ_l C(a,k) C(b,l) (-1)^{b-l} e^{i(2k-a+2l-b)θ}
    let mut re = 0.0;
    let mut im = 0.0;
    let binom_a = binomial_row(a);
    let binom_b = binomial_row(b);
    for (k, ca) in binom_a.iter().enumerate() {
        for (l, cb) in binom_b.iter().enumerate() {
            let sign = if (b as usize - l) % 2 == 0 { 1.0 } else { -1.0 };
            let c = ca * cb * sign;
            let m = 2 * k as i64 - a as i64 + 2 * l as i64 - b as i64;
            if m == 0 {
                re += c * (t1 - t0);
            } else {
                // (e^{imt1} - e^{imt0}) / (im)
                let mf = m as f64;
                let dr = (mf * t1).cos() - (mf * t0).cos();
                let di = (mf * t1).sin() - (mf * t0).sin();
                re += c * di / mf;
                im += -c * dr / mf;
            }
        }
    }
    // divide by 2^a (2i)^b = 2^{a+b} i^b
    let s = 2f64.powi((a + b) as i32);
    let (re, im) = match b % 4 {
        0 => (re, im),
        1 => (im, -re),
        2 => (-re, -im),
        _ => (-im, re),
    };
    debug_assert!(im.abs() <= 1e-9 * (1.0 + re.abs()) * s);
    re / s
}

fn binomial_row(n: u32) -> Vec<f64> {
    let mut row = vec![1.0];
    for k in 1..=n as usize {
        let prev = row[k - 1];
        row.push(prev * (n as usize + 1 - k) as f64 / k as f64);
    }
    row
}

/// Number of Gauss points per sub-arc for an integrand of the given
/// trigonometric degree.
pub fn arc_order(degree: usize) -> usize {
    degree / 2 + 8
}

/// Rule on the great-circle arc `θ ↦ cos θ·e1 + sin θ·e2`, `θ ∈ [0, angle]`.
pub fn arc_rule(e1: &[f64], e2: &[f64], angle: f64, degree: usize) -> Vec<(Point, f64)> {
    if angle <= 0.0 {
        return vec![];
    }
    let pieces = (angle / (PI / 4.0)).ceil().max(1.0) as usize;
    let h = angle / pieces as f64;
    let n = arc_order(degree);
    let mut out = Vec::with_capacity(pieces * n);
    for p in 0..pieces {
        for (t, w) in gauss_legendre_on(n, p as f64 * h, (p + 1) as f64 * h) {
            out.push((add(&scale(e1, t.cos()), &scale(e2, t.sin())), w));
        }
    }
    out
}

/// Largest edge length (radians) of spherical triangles before the
/// gnomonic rule is applied.
pub const SPHERICAL_MAX_EDGE: f64 = 0.7;

/// Rule on the spherical triangle with unit vertices `a, b, c`.
pub fn spherical_triangle_rule(a: &Point, b: &Point, c: &Point, degree: usize) -> Vec<(Point, f64)> {
    let mut out = Vec::new();
    let n = degree / 2 + 9;
    spherical_rec(a, b, c, n, &mut out, 0);
    out
}

fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let c = cross3(a, b);
    norm(&c).atan2(dot(a, b))
}

fn spherical_rec(a: &Point, b: &Point, c: &Point, n: usize, out: &mut Vec<(Point, f64)>, depth: u32) {
    let longest = angle_between(a, b)
        .max(angle_between(b, c))
        .max(angle_between(c, a));
    if longest > SPHERICAL_MAX_EDGE && depth < 12 {
        let ab = normalize(&add(a, b)).expect("antipodal triangle vertices");
        let bc = normalize(&add(b, c)).expect("antipodal triangle vertices");
        let ca = normalize(&add(c, a)).expect("antipodal triangle vertices");
        spherical_rec(a, &ab, &ca, n, out, depth + 1);
        spherical_rec(&ab, b, &bc, n, out, depth + 1);
        spherical_rec(&ca, &bc, c, n, out, depth + 1);
        spherical_rec(&ab, &bc, &ca, n, out, depth + 1);
        return;
    }
    let Some(m) = normalize(&add(&add(a, b), c)) else {
        return;
    };
    let (e1, e2) = tangent_basis(&m);
    let project = |v: &Point| -> [f64; 2] {
        let h = dot(v, &m);
        [dot(v, &e1) / h, dot(v, &e2) / h]
    };
    let (pa, pb, pc) = (project(a), project(b), project(c));
    for (p, w) in triangle_rule(&pa, &pb, &pc, n) {
        let x = axpy(&axpy(&m, p[0], &e1), p[1], &e2);
        let r = norm(&x);
        out.push((scale(&x, 1.0 / r), w / (r * r * r)));
    }
}

/// Orthonormal pair spanning the plane orthogonal to the unit vector `m`.
pub fn tangent_basis(m: &[f64]) -> (Point, Point) {
    let pick = if m[0].abs() < 0.6 {
        vec![1.0, 0.0, 0.0]
    } else if m[1].abs() < 0.6 {
        vec![0.0, 1.0, 0.0]
    } else {
        vec![0.0, 0.0, 1.0]
    };
    let e1 = normalize(&axpy(&pick, -dot(&pick, m), m)).unwrap();
    let e2 = cross3(m, &e1);
    (e1, e2)
}
