use rotval::geom::Polytope;
use rotval::intgeo::{
    crofton_experiment, crofton_sweep, frame_axis_moment, projection_experiment, sample_planes, PlaneMode,
};
use rotval::linalg::{dot, orthonormality_defect, random_orthogonal};
use rotval::random::{random_polytope, rng_for};

fn family(d: usize, count: usize, seed: u64) -> Vec<Polytope> {
    (0..count)
        .map(|i| random_polytope(d, d + 2 + i % 5, &mut rng_for(seed, i as u64)))
        .collect()
}

fn within(a: f64, sa: f64, b: f64, sb: f64, sigmas: f64) -> bool {
    (a - b).abs() <= sigmas * (sa * sa + sb * sb).sqrt()
}

#[test]
fn frames_are_orthonormal_and_offsets_orthogonal() {
    for (d, k) in [(2, 1), (3, 1), (3, 2), (4, 2)] {
        for p in sample_planes(d, k, 1.5, 2000, 1, PlaneMode::Affine).unwrap() {
            assert!(orthonormality_defect(&p.frame) <= 1e-12);
            assert!(p.frame.iter().all(|v| dot(v, &p.basepoint).abs() <= 1e-12));
            assert!(dot(&p.basepoint, &p.basepoint) <= 1.5 * 1.5 * (1.0 + 1e-9));
        }
        let lin = sample_planes(d, k, 1.0, 100, 2, PlaneMode::Linear).unwrap();
        assert!(lin.iter().all(|p| p.basepoint.iter().all(|x| *x == 0.0) && p.weight == 1.0));
    }
}

#[test]
fn same_seed_same_planes() {
    let a = sample_planes(3, 2, 1.0, 500, 3, PlaneMode::Affine).unwrap();
    let b = sample_planes(3, 2, 1.0, 500, 3, PlaneMode::Affine).unwrap();
    assert_eq!(a, b);
}

/// `⟨v, e₁⟩²` has mean `1/d` under the Haar measure. The oracle average
/// is over a Fibonacci lattice on the sphere.
#[test]
fn haar_axis_moment() {
    let n = 100_000;
    let planes = sample_planes(3, 1, 1.0, n, 4, PlaneMode::Linear).unwrap();
    let (mean, se) = frame_axis_moment(&planes);
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let lattice: f64 = (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            (r * (golden * i as f64).cos()).powi(2)
        })
        .sum::<f64>()
        / n as f64;
    assert!((lattice - 1.0 / 3.0).abs() < 1e-4);
    assert!((mean - lattice).abs() <= 3.0 * se, "{mean} ± {se} vs {lattice}");
    let (m2, s2) = frame_axis_moment(&sample_planes(2, 1, 1.0, n, 5, PlaneMode::Linear).unwrap());
    assert!((m2 - 0.5).abs() <= 3.0 * s2);
}

#[test]
fn beyond_the_inner_degree_everything_vanishes() {
    let fam = family(3, 5, 6);
    for k in 1..=2 {
        let r = crofton_experiment(&fam, k, k + 3, 2000, 7).unwrap();
        assert!(r.pass && r.residual == 0.0 && r.estimates.iter().all(|v| *v == 0.0));
        let p = projection_experiment(&fam, k, k + 3, 2000, 7).unwrap();
        assert!(p.pass && p.estimates.iter().all(|v| *v == 0.0));
    }
}

#[test]
fn planar_slices_at_order_zero() {
    let r = crofton_experiment(&family(2, 5, 8), 1, 0, 100_000, 9).unwrap();
    assert_eq!(r.features, vec!["moment(1)^(0)".to_string()]);
    assert!(r.pass, "{r:?}");
}

#[test]
fn spatial_projections_onto_planes() {
    let r = projection_experiment(&family(3, 6, 10), 2, 0, 100_000, 11).unwrap();
    assert_eq!(r.features, vec!["xi(2,0)^(0)".to_string(), "xi(1,1)^(1)".to_string()]);
    assert!(r.pass, "{r:?}");
}

#[test]
fn doubling_scales_slices_by_the_homogeneity_degree() {
    let fam = family(2, 5, 12);
    let big: Vec<Polytope> = fam.iter().map(|k| k.scale(2.0).unwrap()).collect();
    let a = crofton_experiment(&fam, 1, 0, 20_000, 13).unwrap();
    let b = crofton_experiment(&big, 1, 0, 20_000, 14).unwrap();
    for i in 0..fam.len() {
        let f = 16.0;
        assert!(within(b.estimates[i], b.stderr[i], f * a.estimates[i], f * a.stderr[i], 3.0));
    }
}

#[test]
fn projections_scale_by_the_homogeneity_degree() {
    let fam: Vec<Polytope> = (0..5).map(|i| Polytope::regular_polygon(24, 0.6 + 0.05 * i as f64, 0.1 * i as f64)).collect();
    for j in 0..=3usize {
        let lambda: f64 = 1.7;
        let scaled: Vec<Polytope> = fam.iter().map(|k| k.scale(lambda).unwrap()).collect();
        let a = projection_experiment(&fam, 1, j, 20_000, 15).unwrap();
        let b = projection_experiment(&scaled, 1, j, 20_000, 16).unwrap();
        let f = lambda.powi(3 - j as i32);
        for i in 0..fam.len() {
            assert!(within(b.estimates[i], b.stderr[i], f * a.estimates[i], f * a.stderr[i], 3.0), "j={j} body {i}");
        }
    }
}

#[test]
fn rotating_the_family_changes_nothing() {
    let fam = family(3, 5, 17);
    let u = random_orthogonal(3, true, &mut rng_for(18, 0));
    let turned: Vec<Polytope> = fam.iter().map(|k| k.transform(&u).unwrap()).collect();
    let a = crofton_sweep(&fam, 2, 20_000, 19).unwrap();
    let b = crofton_sweep(&turned, 2, 20_000, 20).unwrap();
    for (ra, rb) in a.iter().zip(&b) {
        for i in 0..fam.len() {
            assert!(
                within(ra.estimates[i], ra.stderr[i], rb.estimates[i], rb.stderr[i], 3.0),
                "{} body {i}",
                ra.name
            );
        }
    }
}

#[test]
fn invalid_requests() {
    assert!(sample_planes(3, 3, 1.0, 10, 0, PlaneMode::Linear).is_err());
    assert!(sample_planes(3, 0, 1.0, 10, 0, PlaneMode::Linear).is_err());
    assert!(crofton_experiment(&family(2, 1, 21), 1, 0, 100, 0).is_err());
}
