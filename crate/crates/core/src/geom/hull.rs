//! Convex hulls in local coordinates of the affine hull (dimension 0 to 4).
//!
//! Dimensions 1 and 2 use direct algorithms (extremes, monotone chain). From
//! dimension 3 on, facets are found by brute-force enumeration of candidate
//! hyperplanes through `r`-subsets of points with an inside test.

use crate::linalg::{cross3, dot, generalized_cross, norm, rank, scale, sub, Point};

#[derive(Clone, Debug)]
pub(crate) struct LocalFacet {
    pub normal: Point,
    /// Input indices. For `r = 3` the order is counterclockwise seen from
    /// outside.
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug)]
pub(crate) struct LocalHull {
    /// Input indices of the vertices; counterclockwise for `r = 2`.
    pub vertices: Vec<usize>,
    pub facets: Vec<LocalFacet>,
}

/// Hull of `points` (already expressed in `r` full-rank coordinates).
pub(crate) fn hull(points: &[Point], r: usize, tol: f64) -> LocalHull {
    match r {
        0 => LocalHull {
            vertices: vec![0],
            facets: vec![],
        },
        1 => hull_1d(points),
        2 => hull_2d(points, tol),
        _ => hull_brute(points, r, tol),
    }
}

fn hull_1d(points: &[Point]) -> LocalHull {
    let mut lo = 0;
    let mut hi = 0;
    for (i, p) in points.iter().enumerate() {
        if p[0] < points[lo][0] {
            lo = i;
        }
        if p[0] > points[hi][0] {
            hi = i;
        }
    }
    LocalHull {
        vertices: vec![lo, hi],
        facets: vec![
            LocalFacet {
                normal: vec![-1.0],
                vertices: vec![lo],
            },
            LocalFacet {
                normal: vec![1.0],
                vertices: vec![hi],
            },
        ],
    }
}

fn turn(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain; collinear points are dropped.
pub(crate) fn convex_hull_2d(points: &[Point], tol: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a][0]
            .total_cmp(&points[b][0])
            .then(points[a][1].total_cmp(&points[b][1]))
    });
    if idx.len() < 3 {
        return idx;
    }
    // A turn counts as left only when the distance of b from line oa exceeds tol.
    let left = |o: usize, a: usize, b: usize| {
        let t = turn(&points[o], &points[a], &points[b]);
        let len = norm(&sub(&points[a], &points[o])).max(norm(&sub(&points[b], &points[o])));
        t > tol * len
    };
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && !left(lower[lower.len() - 2], lower[lower.len() - 1], i) {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && !left(upper[upper.len() - 2], upper[upper.len() - 1], i) {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn hull_2d(points: &[Point], tol: f64) -> LocalHull {
    let cyc = convex_hull_2d(points, tol);
    let n = cyc.len();
    let mut facets = Vec::with_capacity(n);
    for k in 0..n {
        let a = cyc[k];
        let b = cyc[(k + 1) % n];
        let e = sub(&points[b], &points[a]);
        let len = norm(&e);
        let normal = vec![e[1] / len, -e[0] / len];
        facets.push(LocalFacet {
            normal,
            vertices: vec![a, b],
        });
    }
    LocalHull {
        vertices: cyc,
        facets,
    }
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let r = idx.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if idx[i] < n - r + i {
            idx[i] += 1;
            for j in i + 1..r {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn hull_brute(points: &[Point], r: usize, tol: f64) -> LocalHull {
    let n = points.len();
    let mut planes: Vec<(Point, f64)> = Vec::new();
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        let base = &points[idx[0]];
        let rows: Vec<Point> = idx[1..].iter().map(|&i| sub(&points[i], base)).collect();
        let c = generalized_cross(&rows);
        let cn = norm(&c);
        let size: f64 = rows.iter().map(|v| norm(v)).product();
        if cn > 1e-9 * size && cn > 0.0 {
            let nrm = scale(&c, 1.0 / cn);
            let h = dot(&nrm, base);
            let mut pos = false;
            let mut neg = false;
            for p in points {
                let s = dot(&nrm, p) - h;
                if s > tol {
                    pos = true;
                } else if s < -tol {
                    neg = true;
                }
                if pos && neg {
                    break;
                }
            }
            if !(pos && neg) {
                let (nn, hh) = if pos { (scale(&nrm, -1.0), -h) } else { (nrm, h) };
                let dup = planes
                    .iter()
                    .any(|(m, g)| dot(m, &nn) > 1.0 - 1e-9 && (g - hh).abs() <= 4.0 * tol);
                if !dup {
                    planes.push((nn, hh));
                }
            }
        }
        if !next_combination(&mut idx, n) {
            break;
        }
    }

    let incident: Vec<Vec<usize>> = planes
        .iter()
        .map(|(m, g)| {
            (0..n)
                .filter(|&i| (dot(m, &points[i]) - g).abs() <= tol)
                .collect()
        })
        .collect();
    let is_vertex: Vec<bool> = (0..n)
        .map(|i| {
            let normals: Vec<Point> = planes
                .iter()
                .zip(&incident)
                .filter(|(_, inc)| inc.contains(&i))
                .map(|((m, _), _)| m.clone())
                .collect();
            normals.len() >= r && rank(&normals, 1e-9) == r
        })
        .collect();
    let vertices: Vec<usize> = (0..n).filter(|&i| is_vertex[i]).collect();
    let mut facets = Vec::with_capacity(planes.len());
    for ((m, _), inc) in planes.into_iter().zip(incident) {
        let mut fv: Vec<usize> = inc.into_iter().filter(|&i| is_vertex[i]).collect();
        if fv.len() < r {
            continue;
        }
        if r == 3 {
            order_facet_ccw(points, &m, &mut fv);
        }
        facets.push(LocalFacet {
            normal: m,
            vertices: fv,
        });
    }
    LocalHull { vertices, facets }
}

/// Sorts the vertices of a 3-d facet counterclockwise around `normal`.
fn order_facet_ccw(points: &[Point], normal: &[f64], fv: &mut [usize]) {
    let k = fv.len() as f64;
    let mut c = vec![0.0; 3];
    for &i in fv.iter() {
        for t in 0..3 {
            c[t] += points[i][t] / k;
        }
    }
    let e1 = {
        let v = sub(&points[fv[0]], &c);
        let v = sub(&v, &scale(normal, dot(&v, normal)));
        scale(&v, 1.0 / norm(&v))
    };
    let e2 = cross3(normal, &e1);
    let ang = |i: usize| {
        let v = sub(&points[i], &c);
        dot(&v, &e2).atan2(dot(&v, &e1))
    };
    fv.sort_by(|&a, &b| ang(a).total_cmp(&ang(b)));
}
