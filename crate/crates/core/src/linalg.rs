//! Small dense helpers for points in R^d with d <= 4 (plus a few slightly
//! larger systems). Heavy lifting (SVD, least squares) goes through nalgebra.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

pub type Point = Vec<f64>;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn sub(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Point {
    a.iter().map(|x| x * s).collect()
}

/// `a + s * b`
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn normalize(a: &[f64]) -> Option<Point> {
    let n = norm(a);
    if n > 0.0 && n.is_finite() {
        Some(scale(a, 1.0 / n))
    } else {
        None
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Determinant of a square matrix given as rows (Gaussian elimination with
/// partial pivoting).
pub fn det(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    if n == 0 {
        return 1.0;
    }
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let mut d = 1.0;
    for c in 0..n {
        let mut piv = c;
        for r in c + 1..n {
            if m[r][c].abs() > m[piv][c].abs() {
                piv = r;
            }
        }
        if m[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            m.swap(piv, c);
            d = -d;
        }
        d *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            if f != 0.0 {
                for k in c..n {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
    }
    d
}

/// Solves `A x = b` for a small square system. Returns `None` when the pivot
/// falls below `tol` relative to the largest entry.
pub fn solve(a: &[Vec<f64>], b: &[f64], tol: f64) -> Option<Point> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let scale_ = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    for c in 0..n {
        let mut piv = c;
        for r in c + 1..n {
            if m[r][c].abs() > m[piv][c].abs() {
                piv = r;
            }
        }
        if m[piv][c].abs() <= tol * scale_ {
            return None;
        }
        m.swap(piv, c);
        for r in 0..n {
            if r != c {
                let f = m[r][c] / m[c][c];
                if f != 0.0 {
                    for k in c..=n {
                        m[r][k] -= f * m[c][k];
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Vector orthogonal to `d - 1` vectors in R^d, via cofactor expansion.
/// Its norm equals the (d-1)-volume of the parallelotope they span.
pub fn generalized_cross(rows: &[Point]) -> Point {
    let d = rows.len() + 1;
    (0..d)
        .map(|i| {
            let minor: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let s = if (i + d + 1) % 2 == 0 { 1.0 } else { -1.0 };
            s * det(&minor)
        })
        .collect()
}

pub fn cross3(a: &[f64], b: &[f64]) -> Point {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Numerical rank of a set of vectors (Gram-Schmidt with relative tolerance).
pub fn rank(vectors: &[Point], tol: f64) -> usize {
    let mut basis: Vec<Point> = Vec::new();
    for v in vectors {
        let scale_ = norm(v);
        if scale_ == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &basis {
                let c = dot(&w, u);
                w = axpy(&w, -c, u);
            }
        }
        let r = norm(&w);
        if r > tol * scale_ {
            basis.push(scale(&w, 1.0 / r));
        }
    }
    basis.len()
}

/// Gram-determinant volume of the parallelotope spanned by `edges`.
pub fn gram_volume(edges: &[Point]) -> f64 {
    let k = edges.len();
    if k == 0 {
        return 1.0;
    }
    let g: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| dot(&edges[i], &edges[j])).collect())
        .collect();
    det(&g).max(0.0).sqrt()
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Volume of the unit ball in R^n.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}

/// Modified Gram-Schmidt; returns `None` if the vectors are (numerically)
/// dependent.
pub fn orthonormalize(vectors: &[Point]) -> Option<Vec<Point>> {
    let mut out: Vec<Point> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let c = dot(&w, u);
                w = axpy(&w, -c, u);
            }
        }
        out.push(normalize(&w).filter(|_| norm(&w) > 1e-12 * norm(v).max(1e-300))?);
    }
    Some(out)
}

/// Maximum entry of |Vᵀ V − I| for a list of vectors.
pub fn orthonormality_defect(frame: &[Point]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in frame.iter().enumerate() {
        for (j, b) in frame.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(a, b) - target).abs());
        }
    }
    worst
}

/// Square matrix stored as rows.
pub type Matrix = Vec<Vec<f64>>;

pub fn mat_vec(m: &Matrix, v: &[f64]) -> Point {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn transpose(m: &Matrix) -> Matrix {
    if m.is_empty() {
        return vec![];
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|r| r[j]).collect())
        .collect()
}

pub fn identity(d: usize) -> Matrix {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// Haar-random orthogonal matrix (QR of a Gaussian matrix with sign
/// correction). With `proper` the determinant is forced to +1.
pub fn random_orthogonal<R: Rng + ?Sized>(d: usize, proper: bool, rng: &mut R) -> Matrix {
    loop {
        let cols: Vec<Point> = (0..d)
            .map(|_| (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        if let Some(q) = orthonormalize(&cols) {
            let mut m = transpose(&q);
            if proper && det(&m) < 0.0 {
                for row in m.iter_mut() {
                    row[0] = -row[0];
                }
            }
            return m;
        }
    }
}

/// Maximum entry of |Mᵀ M − I|.
pub fn orthogonality_defect(m: &Matrix) -> f64 {
    orthonormality_defect(&transpose(m))
}

/// Rows of `points` as an n×d nalgebra matrix.
pub fn to_dmatrix(rows: &[Point], cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
}

/// Uniform point in the unit ball of R^n.
pub fn uniform_in_ball<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Point {
    if n == 0 {
        return vec![];
    }
    let g: Point = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let dir = normalize(&g).unwrap_or_else(|| {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        e
    });
    let r: f64 = rng.random::<f64>().powf(1.0 / n as f64);
    scale(&dir, r)
}

/// Uniform point on the unit sphere S^{n-1}.
pub fn uniform_on_sphere<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Point {
    loop {
        let g: Point = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        if let Some(u) = normalize(&g) {
            return u;
        }
    }
}
