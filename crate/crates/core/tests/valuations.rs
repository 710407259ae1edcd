use std::f64::consts::PI;

use proptest::prelude::*;
use rotval::geom::{build_polytope, minkowski_sum, monte_carlo_oracle, McTarget, Polytope};
use rotval::linalg::{mat_vec, random_orthogonal, transpose, uniform_in_ball};
use rotval::poly::MultiPoly;
use rotval::random::{random_polytope, rng_for};
use rotval::valuation::{
    evaluate, evaluate_on_parallel_body, quermassintegrals, steiner_by_fit, steiner_coefficients,
    translation_polynomial, Descriptor,
};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn planar() -> Vec<Descriptor> {
    vec![
        Descriptor::moment(0),
        Descriptor::moment(1),
        Descriptor::moment(2),
        Descriptor::xi(0, 0),
        Descriptor::xi(1, 1),
        Descriptor::xi(2, 0),
        Descriptor::xi(3, 1),
        Descriptor::psi(2, 1),
        Descriptor::psi(0, 3),
    ]
}

#[test]
fn square_parallel_values() {
    let sq = Polytope::cube(2);
    let v = evaluate_on_parallel_body(&Descriptor::moment(0), &sq, 1.0).unwrap();
    assert!((v - (12.0 + PI)).abs() < 1e-12);
    let p = evaluate_on_parallel_body(&Descriptor::xi(0, 0), &sq, 1.0).unwrap();
    assert!((p - (8.0 + 2.0 * PI)).abs() < 1e-12);
    let per = steiner_coefficients(&Descriptor::xi(0, 0), &sq).unwrap();
    assert!((per.coeff(0) - 8.0).abs() < 1e-12 && (per.coeff(1) - 2.0 * PI).abs() < 1e-12);
}

#[test]
fn square_second_moment_expansion() {
    let e = steiner_coefficients(&Descriptor::moment(1), &Polytope::cube(2)).unwrap();
    let expect = [8.0 / 3.0, 32.0 / 3.0, 8.0 + 2.0 * PI, 8.0, PI / 2.0];
    for (j, x) in expect.iter().enumerate() {
        assert!(rel(e.coeff(j), *x) < 1e-12, "eps^{j}: {} vs {x}", e.coeff(j));
    }
}

#[test]
fn cube_quermassintegrals() {
    let w = quermassintegrals(&Polytope::cube(3)).unwrap();
    let expect = [8.0, 8.0, 2.0 * PI, 4.0 * PI / 3.0];
    for (a, b) in w.iter().zip(expect) {
        assert!(rel(*a, b) < 1e-10);
    }
}

/// `∫_{K+εB} |x|²` for a triangle at `ε = 1/2`, against sampling on the sum
/// of the triangle with an inscribed 256-gon. The sum lies inside `K + εB`;
/// the gap is bounded by the exact missing area times `max |x|²`.
#[test]
fn triangle_parallel_moment_matches_sampling() {
    let tri = build_polytope(&[vec![-0.4, -0.3], vec![0.7, -0.1], vec![0.1, 0.6]], 2).unwrap();
    let eps = 0.5;
    let exact = evaluate_on_parallel_body(&Descriptor::moment(1), &tri, eps).unwrap();
    let disk = Polytope::regular_polygon(256, eps, 0.0);
    let approx = minkowski_sum(&tri, &disk).unwrap();
    let gap = evaluate_on_parallel_body(&Descriptor::moment(0), &tri, eps).unwrap() - approx.volume();
    assert!(gap > 0.0);
    let rmax = tri.max_norm() + eps;
    let bound = gap * rmax * rmax;
    let mc = monte_carlo_oracle(&approx, &McTarget::Interior(MultiPoly::norm_squared(2)), 1_000_000, 9).unwrap();
    assert!(
        (mc.estimate - exact).abs() <= 3.0 * mc.stderr + bound,
        "{exact} vs {mc:?}, discretization bound {bound:e}"
    );
}

#[test]
fn moment_translation_expansion() {
    let tri = build_polytope(&[vec![0.0, 0.0], vec![2.0, 0.0], vec![0.5, 1.0]], 2).unwrap();
    let t = translation_polynomial(&Descriptor::moment(1), &tri, 2).unwrap();
    let area = tri.volume();
    let centroid = [2.5 / 3.0, 1.0 / 3.0];
    // vol |x|² + 2⟨x, ∫ s⟩ + ∫ |s|²
    assert!((t.poly.coeff(&[2, 0]) - area).abs() < 1e-9);
    assert!((t.poly.coeff(&[1, 0]) - 2.0 * area * centroid[0]).abs() < 1e-9);
    assert!((t.poly.coeff(&[0, 1]) - 2.0 * area * centroid[1]).abs() < 1e-9);
    assert!((t.poly.coeff(&[0, 0]) - evaluate(&Descriptor::moment(1), &tri).unwrap()).abs() < 1e-9);
    let v = translation_polynomial(&Descriptor::moment(0), &tri, 0).unwrap();
    assert!((v.poly.coeff(&[0, 0]) - area).abs() < 1e-12);
}

#[test]
fn square_xi_translation() {
    let t = translation_polynomial(&Descriptor::xi(2, 0), &Polytope::cube(2), 2).unwrap();
    assert!((t.poly.coeff(&[0, 0]) - 8.0).abs() < 1e-9);
    assert!((t.poly.coeff(&[2, 0]) - 4.0).abs() < 1e-9);
    assert!((t.poly.coeff(&[0, 2]) - 4.0).abs() < 1e-9);
    assert!(t.poly.coeff(&[1, 1]).abs() < 1e-9);
}

fn polygon() -> impl Strategy<Value = Polytope> {
    (any::<u64>(), 3usize..10).prop_map(|(seed, n)| random_polytope(2, n, &mut rng_for(seed, 0)))
}

fn solid() -> impl Strategy<Value = Polytope> {
    (any::<u64>(), 4usize..9).prop_map(|(seed, n)| random_polytope(3, n, &mut rng_for(seed, 0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn boundary_and_interior_moments_agree(k in prop_oneof![polygon(), solid()], q in 0u32..=2) {
        let d = k.dim() as f64;
        let lhs = evaluate(&Descriptor::xi(1, q), &k).unwrap();
        let rhs = (d + 2.0 * q as f64) * evaluate(&Descriptor::moment(q), &k).unwrap();
        prop_assert!(rel(lhs, rhs) < 1e-10);
    }

    #[test]
    fn first_order_psi(k in polygon()) {
        let area = k.volume();
        prop_assert!(rel(evaluate(&Descriptor::psi(1, 0), &k).unwrap(), 2.0 * area) < 1e-12);
        prop_assert!(evaluate(&Descriptor::psi(0, 1), &k).unwrap().abs() < 1e-12);
    }

    #[test]
    fn expansion_paths_agree(k in polygon(), which in 0usize..9) {
        let desc = planar()[which];
        let a = steiner_coefficients(&desc, &k).unwrap();
        let b = steiner_by_fit(&desc, &k).unwrap();
        let scale = a.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        for (x, y) in a.coeffs.iter().zip(&b.poly.coeffs) {
            prop_assert!((x - y).abs() <= 1e-7 * scale, "{desc}: {:?} vs {:?}", a.coeffs, b.poly.coeffs);
        }
    }

    #[test]
    fn expansion_evaluates_like_the_parallel_body(k in prop_oneof![polygon(), solid()], eps in 0.0f64..2.0) {
        for desc in [Descriptor::moment(1), Descriptor::xi(2, 0), Descriptor::xi(1, 1)] {
            let e = steiner_coefficients(&desc, &k).unwrap();
            let v = evaluate_on_parallel_body(&desc, &k, eps).unwrap();
            prop_assert!(rel(e.eval(eps), v) < 1e-9);
        }
    }

    #[test]
    fn leading_form_ignores_translation(k in polygon(), seed in any::<u64>(), which in 0usize..9) {
        let desc = planar()[which];
        let x = uniform_in_ball(2, &mut rng_for(seed, 1));
        let a = translation_polynomial(&desc, &k, desc.degree()).unwrap().leading_form();
        let b = translation_polynomial(&desc, &k.translate(&x), desc.degree()).unwrap().leading_form();
        prop_assert!(a.max_abs_diff(&b) <= 1e-8 * a.max_abs_coeff().max(1.0));
    }

    #[test]
    fn leading_form_is_rotation_equivariant(k in prop_oneof![polygon(), solid()], seed in any::<u64>()) {
        let mut rng = rng_for(seed, 2);
        let d = k.dim();
        let u = random_orthogonal(d, true, &mut rng);
        let desc = Descriptor::xi(2, 1);
        let a = translation_polynomial(&desc, &k, 4).unwrap().leading_form();
        let b = translation_polynomial(&desc, &k.transform(&u).unwrap(), 4).unwrap().leading_form();
        let ut = transpose(&u);
        for _ in 0..10 {
            let x = uniform_in_ball(d, &mut rng);
            let lhs = b.eval(&x);
            let rhs = a.eval(&mat_vec(&ut, &x));
            prop_assert!((lhs - rhs).abs() <= 1e-8 * a.max_abs_coeff().max(1.0));
        }
    }
}

#[test]
fn translation_reports_survive_json() {
    let t = translation_polynomial(&Descriptor::xi(2, 0), &Polytope::cube(2), 2).unwrap();
    let text = serde_json::to_string(&t).unwrap();
    let back: rotval::valuation::TranslationPolynomial = serde_json::from_str(&text).unwrap();
    assert_eq!(back, t);
}
