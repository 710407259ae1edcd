use proptest::prelude::*;
use rotval::geom::{minkowski_sum, Polytope};
use rotval::inequalities::{
    interval_moment_expansion, mixed_moment, monotonicity_pair, monotonicity_scan, nonneg_scan,
    segment_mixed_coefficient,
};
use rotval::random::{random_centered_segment, random_origin_polytope, random_zonotope, rng_for, BodyClass};
use rotval::report::ExperimentReport;
use rotval::valuation::{steiner_coefficients, Descriptor};

fn segment(u: [f64; 2]) -> Polytope {
    Polytope::segment(vec![-u[0], -u[1]], u.to_vec()).unwrap()
}

fn unit(deg: f64) -> [f64; 2] {
    [deg.to_radians().cos(), deg.to_radians().sin()]
}

#[test]
fn sixty_degree_fixture() {
    let u = [0.0, 30.0, 60.0, 90.0].map(unit);
    let r = mixed_moment(&u.map(segment)).unwrap();
    assert!((r.coefficient - 3f64.sqrt() / 6.0).abs() < 1e-8);
    assert!(r.closed_form_error().unwrap() < 1e-8);
    assert!(r.identity_residual.unwrap().abs() < 1e-12);
}

#[test]
fn direction_order_is_found_automatically() {
    let u = [0.0, 30.0, 60.0, 90.0].map(unit);
    let shuffled = [u[2], [-u[0][0], -u[0][1]], u[3], u[1]];
    assert!((segment_mixed_coefficient(&shuffled) - segment_mixed_coefficient(&u)).abs() < 1e-15);
}

#[test]
fn interval_closed_form_matches_the_engine() {
    let iv = Polytope::segment(vec![-0.4], vec![1.3]).unwrap();
    for q in 0..=3 {
        let a = interval_moment_expansion(q, 0.4, 1.3);
        let b = steiner_coefficients(&Descriptor::moment(q), &iv).unwrap();
        for (j, x) in a.iter().enumerate() {
            assert!((x - b.coeff(j)).abs() < 1e-12, "q={q} j={j}");
        }
    }
}

#[test]
fn volume_scan_never_fails() {
    let r = nonneg_scan(0, 2, 300, 1).unwrap();
    assert!(r.pass && r.violations.is_empty());
    assert_eq!(r.details["control_violations"], 0.0);
}

#[test]
fn first_derivative_is_monotone() {
    for d in 1..=2 {
        let r = monotonicity_scan(1, 1, d, BodyClass::OriginContaining, 200, 2).unwrap();
        assert!(r.pass);
        assert_eq!(r.details["asserted"], 1.0);
    }
    let s = monotonicity_scan(2, 1, 2, BodyClass::Symmetric, 100, 3).unwrap();
    assert_eq!(s.details["asserted"], 0.0);
}

#[test]
fn pairs_must_be_nested() {
    let outer = Polytope::cube(2);
    let inner = Polytope::cube(2).scale(0.5).unwrap();
    let (a, b) = monotonicity_pair(1, 1, &outer, &inner).unwrap();
    assert!(a > b);
    assert!(monotonicity_pair(1, 1, &inner, &outer).is_err());
}

#[test]
fn reports_round_trip_through_json() {
    let r = monotonicity_scan(2, 2, 1, BodyClass::OriginContaining, 50, 4).unwrap();
    let text = serde_json::to_string(&r).unwrap();
    let back: ExperimentReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
}

#[test]
fn segments_outside_the_plane_are_rejected() {
    let s = Polytope::segment(vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]).unwrap();
    assert!(mixed_moment(&[s.clone(), s.clone(), s.clone(), s]).is_err());
}

fn quadruple() -> impl Strategy<Value = [Polytope; 4]> {
    any::<u64>().prop_map(|seed| {
        let mut rng = rng_for(seed, 0);
        std::array::from_fn(|i| {
            if i % 2 == 0 {
                random_centered_segment(2, 1.0, &mut rng)
            } else {
                random_zonotope(2, 3, 0.5, &mut rng)
            }
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn symmetric_in_its_arguments(ks in quadruple(), perm in Just([2usize, 0, 3, 1])) {
        let a = mixed_moment(&ks).unwrap().coefficient;
        let permuted: [Polytope; 4] = std::array::from_fn(|i| ks[perm[i]].clone());
        let b = mixed_moment(&permuted).unwrap().coefficient;
        prop_assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn additive_in_the_first_slot(ks in quadruple(), seed in any::<u64>()) {
        let extra = random_centered_segment(2, 1.0, &mut rng_for(seed, 1));
        let p = |first: &Polytope| {
            mixed_moment(&[first.clone(), ks[1].clone(), ks[2].clone(), ks[3].clone()]).unwrap().coefficient
        };
        let sum = minkowski_sum(&ks[0], &extra).unwrap();
        prop_assert!((p(&sum) - p(&ks[0]) - p(&extra)).abs() < 1e-8);
    }

    #[test]
    fn centered_zonotopes_have_nonnegative_coefficients(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 2);
        let ks: [Polytope; 4] = std::array::from_fn(|_| random_zonotope(2, 2 + seed as usize % 4, 0.5, &mut rng));
        prop_assert!(mixed_moment(&ks).unwrap().all_nonnegative());
    }

    #[test]
    fn origin_bodies_have_nonnegative_expansions(seed in any::<u64>(), q in 0u32..=2) {
        let k = random_origin_polytope(2, 7, &mut rng_for(seed, 3));
        let e = steiner_coefficients(&Descriptor::moment(q), &k).unwrap();
        prop_assert!(e.coeffs.iter().all(|c| *c >= -1e-9));
    }
}
