//! Acceptance run: one line per criterion, with its runtime budget.
//!
//! Run with `cargo test -p rotval --test acceptance`. The process exits
//! nonzero if an attainable criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use rotval::geom::{minkowski_sum, Polytope};
use rotval::inequalities::{
    four_vector_identity, mixed_moment, monotonicity_scan, nonneg_scan, segment_mixed_coefficient, segment_scan,
    zonotope_scan,
};
use rotval::intgeo::{constant_discrepancy, crofton_sweep, projection_sweep};
use rotval::linalg::{random_orthogonal, uniform_on_sphere};
use rotval::poly::MultiPoly;
use rotval::random::{random_cut, random_polytope, rng_for, BodyClass};
use rotval::valuation::{
    derivative_translation_polynomial, evaluate, evaluate_on_parallel_body, leading_form_pairing,
    steiner_coefficients, translation_polynomial, Descriptor,
};
use rotval::verify::{
    basis_self_fit, check_additivity, check_invariance, check_minkowski_polynomiality, dimension_table, fit_in_basis,
    Group,
};

type Outcome = Result<(bool, String), String>;

struct Criterion {
    id: &'static str,
    title: &'static str,
    budget: Duration,
    /// Known to be unattainable; reported but not counted.
    unattainable: Option<&'static str>,
    run: fn() -> Outcome,
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn bodies(d: usize, count: usize, seed: u64) -> Vec<Polytope> {
    (0..count)
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            let n = rng.random_range(d + 2..=d + 7);
            random_polytope(d, n, &mut rng)
        })
        .collect()
}

fn descriptors(d: usize) -> Vec<Descriptor> {
    let mut out = vec![
        Descriptor::moment(0),
        Descriptor::moment(1),
        Descriptor::moment(2),
        Descriptor::xi(0, 0),
        Descriptor::xi(1, 0),
        Descriptor::xi(0, 1),
        Descriptor::xi(1, 1),
        Descriptor::xi(2, 0),
        Descriptor::xi(3, 0),
        Descriptor::xi(2, 1),
    ];
    if d == 2 {
        out.extend([
            Descriptor::xi(1, 2),
            Descriptor::psi(0, 0),
            Descriptor::psi(1, 0),
            Descriptor::psi(0, 1),
            Descriptor::psi(2, 0),
            Descriptor::psi(1, 1),
            Descriptor::psi(0, 2),
            Descriptor::psi(3, 0),
            Descriptor::psi(2, 1),
            Descriptor::psi(1, 2),
        ]);
    }
    out
}

fn exact_fixtures() -> Outcome {
    let sq = Polytope::cube(2);
    let cube = Polytope::cube(3);
    let st = steiner_coefficients(&Descriptor::moment(0), &sq).map_err(err)?;
    let checks = [
        ("xi(2,0)", evaluate(&Descriptor::xi(2, 0), &sq).map_err(err)?, 8.0),
        ("xi(1,1)", evaluate(&Descriptor::xi(1, 1), &sq).map_err(err)?, 32.0 / 3.0),
        ("moment(1) cube", evaluate(&Descriptor::moment(1), &cube).map_err(err)?, 8.0),
        ("steiner 0", st.coeff(0), 4.0),
        ("steiner 1", st.coeff(1), 8.0),
        ("steiner 2", st.coeff(2), PI),
    ];
    let worst = checks.iter().map(|(_, v, e)| rel(*v, *e)).fold(0.0, f64::max);
    Ok((worst <= 1e-10, format!("6 values, worst relative error {worst:.1e}")))
}

fn xi_one_identity() -> Outcome {
    let mut worst = 0.0f64;
    let mut n = 0;
    for d in [2, 3] {
        for k in bodies(d, 50, 20 + d as u64) {
            for q in 0..=2 {
                let lhs = evaluate(&Descriptor::xi(1, q), &k).map_err(err)?;
                let rhs = (d as f64 + 2.0 * q as f64) * evaluate(&Descriptor::moment(q), &k).map_err(err)?;
                worst = worst.max(rel(lhs, rhs));
                n += 1;
            }
        }
    }
    Ok((worst <= 1e-9, format!("{n} comparisons on 100 polytopes, worst {worst:.1e}")))
}

fn additivity() -> Outcome {
    let mut worst = 0.0f64;
    let mut n = 0;
    for d in [2, 3] {
        let descs = descriptors(d);
        for (i, k) in bodies(d, 200, 30 + d as u64).iter().enumerate() {
            let mut rng = rng_for(40 + d as u64, i as u64);
            let h = random_cut(k, &mut rng);
            for desc in &descs {
                let r = check_additivity(desc, k, &h).map_err(err)?;
                worst = worst.max(r.residual);
                n += 1;
            }
        }
    }
    Ok((worst <= 1e-9, format!("{n} checks over 400 (body, cut) pairs, worst {worst:.1e}")))
}

fn minkowski_degree() -> Outcome {
    let d2 = descriptors(2);
    let d3 = [Descriptor::moment(0), Descriptor::moment(1), Descriptor::xi(2, 0), Descriptor::xi(1, 1), Descriptor::xi(0, 0)];
    let (mut worst, mut overflow, mut failed) = (0.0f64, 0.0f64, 0);
    for t in 0..50u64 {
        let mut rng = rng_for(50, t);
        let (d, desc, s) = if t % 5 < 3 {
            (2, d2[t as usize % d2.len()], 1 + t as usize % 3)
        } else {
            (3, d3[t as usize % d3.len()], 1 + t as usize % 2)
        };
        let ks: Vec<Polytope> = (0..s)
            .map(|_| {
                let n = rng.random_range(d + 1..=d + 3);
                random_polytope(d, n, &mut rng)
            })
            .collect();
        let r = check_minkowski_polynomiality(&desc, &ks, desc.degree()).map_err(err)?;
        worst = worst.max(r.residual);
        overflow = overflow.max(r.details["overflow"]);
        failed += usize::from(!r.pass);
    }
    Ok((
        failed == 0,
        format!("50 tuples, worst residual {worst:.1e}, worst overflow {overflow:.1e}, {failed} failed"),
    ))
}

fn translation_degree() -> Outcome {
    let mut cases: Vec<(usize, Descriptor)> = descriptors(2).into_iter().map(|x| (2, x)).collect();
    cases.extend([Descriptor::moment(1), Descriptor::xi(1, 1), Descriptor::xi(2, 0)].map(|x| (3, x)));
    let (mut worst, mut sharp, mut failed) = (0.0f64, f64::INFINITY, Vec::new());
    for (ci, (d, desc)) in cases.iter().enumerate() {
        let count = if *d == 2 { 20 } else { 8 };
        for k in bodies(*d, count, 60 + ci as u64) {
            let t = translation_polynomial(desc, &k, desc.degree()).map_err(err)?;
            worst = worst.max(t.residual);
            let exact = t.lower_residual.is_none_or(|r| r > 1e-6);
            if let Some(r) = t.lower_residual {
                sharp = sharp.min(r);
            }
            if !t.degree_law_holds() || !exact {
                failed.push(format!("{desc} d={d}"));
            }
        }
    }
    failed.dedup();
    Ok((
        failed.is_empty(),
        format!(
            "{} descriptors (psi(1,0), psi(0,1) at 0, xi(1,q) at 2q), worst residual {worst:.1e}, smallest lower-degree residual {sharp:.1e}{}",
            cases.len(),
            if failed.is_empty() { String::new() } else { format!(", failed: {}", failed.join(" ")) }
        ),
    ))
}

fn leading_form() -> Outcome {
    let desc = Descriptor::xi(2, 0);
    let sq = Polytope::cube(2);
    let t = derivative_translation_polynomial(&desc, 0, &sq, 2).map_err(err)?;
    let square_err = t.leading_form().max_abs_diff(&MultiPoly::norm_squared(2).scale(&4.0));
    let mut worst = 0.0f64;
    for k in bodies(2, 20, 70) {
        let t = derivative_translation_polynomial(&desc, 0, &k, 2).map_err(err)?;
        let pairing = leading_form_pairing(2, 0, 0, &k).map_err(err)?;
        worst = worst.max(t.leading_form().max_abs_diff(&pairing) / pairing.max_abs_coeff());
    }
    Ok((
        square_err <= 1e-8 && worst <= 1e-8,
        format!("square vs 4|x|^2 {square_err:.1e}, pairing on 20 polygons {worst:.1e}"),
    ))
}

fn dimensions() -> Outcome {
    let o = dimension_table(5, 10, Group::O).map_err(err)?;
    let so = dimension_table(2, 10, Group::SO).map_err(err)?;
    let mut ok = o.consistent() && so.consistent();
    for d in 2..=5 {
        ok &= o.get(d, 0).unwrap().cumulative == d + 1;
        ok &= o.get(d, 1).unwrap().increment == 0;
    }
    ok &= so.get(2, 1).unwrap().increment == 0;
    let o32 = o.get(3, 2).unwrap().cumulative;
    let so22 = so.get(2, 2).unwrap().cumulative;
    ok &= o32 == 10 && so22 == 8;
    Ok((ok, format!("d = 2..5, l = 0..10 consistent; O(3) at l=2: {o32}, SO(2) at l=2: {so22}")))
}

fn basis_membership() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut failed = 0;
    for (d, ell, group, n) in [(2, 4, Group::O, 10), (2, 4, Group::SO, 10), (3, 2, Group::O, 8)] {
        for (_, r) in basis_self_fit(d, ell, &bodies(d, n, 80 + d as u64), group, 81).map_err(err)? {
            worst = worst.max(r.residual).max(r.details["unit_error"]);
            failed += usize::from(!r.pass);
            count += 1;
        }
    }
    let shifted = fit_in_basis(
        |k| evaluate_on_parallel_body(&Descriptor::xi(2, 0), k, 1.0),
        2,
        2,
        &bodies(2, 8, 82),
        Group::O,
        83,
    )
    .map_err(err)?;
    Ok((
        failed == 0 && shifted.report.pass,
        format!(
            "{count} elements recovered (worst {worst:.1e}, {failed} failed); xi(2,0)(K+B) residual {:.1e}",
            shifted.report.residual
        ),
    ))
}

fn integral_geometry() -> Outcome {
    let n = 100_000;
    let mut fits = 0;
    let mut zeros = 0;
    let mut failed = Vec::new();
    let mut worst_z = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for (d, k) in [(2, 1), (3, 1), (3, 2)] {
        let family = bodies(d, 8, 90 + (d * 3 + k) as u64);
        for kind in ["crofton", "projection"] {
            let run = |seed| match kind {
                "crofton" => crofton_sweep(&family, k, n, seed),
                _ => projection_sweep(&family, k, n, seed),
            };
            let a = run(91).map_err(err)?;
            let b = run(92).map_err(err)?;
            for (ra, rb) in a.iter().zip(&b) {
                if ra.features.is_empty() {
                    zeros += 1;
                } else {
                    fits += 1;
                    worst_ratio = worst_ratio.max(ra.residual / ra.threshold.max(f64::MIN_POSITIVE));
                    let z = constant_discrepancy(ra, rb).map_err(err)?;
                    worst_z = worst_z.max(z);
                    if z > 3.0 {
                        failed.push(format!("{} unstable (z = {z:.2})", ra.name));
                    }
                }
                for r in [ra, rb] {
                    if !r.pass {
                        failed.push(r.name.clone());
                    }
                }
            }
        }
    }
    Ok((
        failed.is_empty(),
        format!(
            "{fits} regressions (worst residual/threshold {worst_ratio:.2}), {zeros} exact zeros, worst seed discrepancy {worst_z:.2} se{}",
            if failed.is_empty() { String::new() } else { format!("; failed: {}", failed.join(", ")) }
        ),
    ))
}

fn nonnegativity() -> Outcome {
    let mut violations = 0;
    let mut closed = 0.0f64;
    for q in 0..=2 {
        let r = nonneg_scan(q, 2, 1000, 100 + q as u64).map_err(err)?;
        violations += r.violations.len() + usize::from(!r.pass);
        let r1 = nonneg_scan(q, 1, 200, 110 + q as u64).map_err(err)?;
        violations += r1.violations.len() + usize::from(!r1.pass);
        closed = closed.max(r1.details["closed_form_error"]);
    }
    Ok((
        violations == 0 && closed <= 1e-12,
        format!("3 x 1000 polygons, {violations} violations; d=1 closed form error {closed:.1e}"),
    ))
}

fn segment(u: [f64; 2]) -> Polytope {
    Polytope::segment(vec![-u[0], -u[1]], u.to_vec()).unwrap()
}

/// `P` by inclusion-exclusion over sub-sums: the degree-4 form in `λ` has
/// `λ₁λ₂λ₃λ₄` coefficient `Σ_S (−1)^{4−|S|} f(1_S)`.
fn inclusion_exclusion(ks: &[Polytope; 4]) -> f64 {
    let mut total = 0.0;
    for mask in 1u32..16 {
        let mut sum: Option<Polytope> = None;
        for (i, k) in ks.iter().enumerate() {
            if mask >> i & 1 == 1 {
                sum = Some(match sum {
                    None => k.clone(),
                    Some(s) => minkowski_sum(&s, k).unwrap(),
                });
            }
        }
        let v = evaluate(&Descriptor::moment(1), &sum.unwrap()).unwrap_or(0.0);
        total += if (4 - mask.count_ones()) % 2 == 0 { v } else { -v };
    }
    total / 24.0
}

fn mixed_moment_criterion() -> Outcome {
    let fixture = [0.0f64, 30.0, 60.0, 90.0].map(|a| [a.to_radians().cos(), a.to_radians().sin()]);
    let fixture_err = (mixed_moment(&fixture.map(segment)).map_err(err)?.coefficient - 3f64.sqrt() / 6.0).abs();
    let scan = segment_scan(500, 120).map_err(err)?;
    let mut identity = 0.0f64;
    let mut oracle = 0.0f64;
    let mut rng = rng_for(121, 0);
    for t in 0..1000 {
        let u: [[f64; 2]; 4] = std::array::from_fn(|_| {
            let v = uniform_on_sphere(2, &mut rng);
            let r = 0.1 + 2.0 * rng.random::<f64>();
            [r * v[0], r * v[1]]
        });
        identity = identity.max(four_vector_identity(&u).abs());
        if t < 20 {
            oracle = oracle.max((inclusion_exclusion(&u.map(segment)) - segment_mixed_coefficient(&u)).abs());
        }
    }
    let zono = zonotope_scan(200, 6, 122).map_err(err)?;
    let ok = fixture_err <= 1e-8 && scan.pass && identity <= 1e-12 && oracle <= 1e-8 && zono.pass;
    Ok((
        ok,
        format!(
            "sqrt(3)/6 fixture {fixture_err:.1e}; 500 quadruples worst {:.1e}; identity {identity:.1e}; inclusion-exclusion {oracle:.1e}; 200 zonotope tuples, {} negative",
            scan.residual,
            zono.violations.len()
        ),
    ))
}

fn monotonicity() -> Outcome {
    let mut found_first = 0;
    let mut pairs_first = 0;
    for d in 1..=2 {
        for q in 0..=2 {
            let r = monotonicity_scan(1, q, d, BodyClass::OriginContaining, 500, 130 + q as u64).map_err(err)?;
            found_first += r.details["violations_found"] as usize;
            pairs_first += r.samples;
        }
    }
    let mut found_second = 0;
    let mut pairs_second = 0;
    for q in 0..=3 {
        let r = monotonicity_scan(2, q, 1, BodyClass::OriginContaining, 2000, 140 + q as u64).map_err(err)?;
        found_second += r.details["violations_found"] as usize;
        pairs_second += r.samples;
    }
    let mut symmetric = 0;
    for q in 1..=2 {
        let r = monotonicity_scan(2, q, 2, BodyClass::Symmetric, 500, 150 + q as u64).map_err(err)?;
        symmetric += r.details["violations_found"] as usize;
    }
    Ok((
        found_first == 0 && found_second > 0,
        format!(
            "j=1: {found_first} violations in {pairs_first} pairs; j=2, d=1: {found_second} violations in {pairs_second} nested intervals containing 0; j=2 symmetric plane (report only): {symmetric}"
        ),
    ))
}

fn reflection_law() -> Outcome {
    let polys = bodies(2, 20, 160);
    let mut worst = 0.0f64;
    let mut flips_seen = Vec::new();
    let mut rng = rng_for(161, 0);
    for total in 0..=5u32 {
        for p in 0..=total {
            let q = total - p;
            let desc = Descriptor::psi(p, q);
            let mut flip = 0.0f64;
            let mut size = 0.0f64;
            for k in &polys {
                let ms: Vec<_> = (0..6).map(|i| random_orthogonal(2, i % 2 == 0, &mut rng)).collect();
                let r = check_invariance(&desc, k, &ms).map_err(err)?;
                worst = worst.max(r.residual);
                let v = r.details["value"];
                size = size.max(v.abs());
                let mirror = k.transform(&vec![vec![1.0, 0.0], vec![0.0, -1.0]]).map_err(err)?;
                flip = flip.max((evaluate(&desc, &mirror).map_err(err)? - v).abs());
            }
            if q % 2 == 1 && size > 1e-9 {
                flips_seen.push(flip > 1e-6 * size);
            }
        }
    }
    let odd = flips_seen.len();
    let broken = flips_seen.iter().filter(|b| **b).count();
    Ok((
        worst <= 1e-9 && broken == odd,
        format!(
            "21 descriptors x 20 polygons, sign law worst {worst:.1e}; reflection changes the value for {broken} of {odd} nonvanishing odd-q descriptors"
        ),
    ))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: "01", title: "exact fixtures", budget: Duration::from_secs(1), unattainable: None, run: exact_fixtures },
        Criterion { id: "02", title: "xi(1,q) = (d+2q) moment(q)", budget: Duration::from_secs(30), unattainable: None, run: xi_one_identity },
        Criterion { id: "03", title: "additivity under cuts", budget: Duration::from_secs(60), unattainable: None, run: additivity },
        Criterion { id: "04", title: "Minkowski polynomial degree", budget: Duration::from_secs(120), unattainable: None, run: minkowski_degree },
        Criterion { id: "05", title: "translation degree laws", budget: Duration::from_secs(60), unattainable: None, run: translation_degree },
        Criterion { id: "06", title: "leading form pairing", budget: Duration::from_secs(30), unattainable: None, run: leading_form },
        Criterion { id: "07", title: "dimension tables", budget: Duration::from_secs(1), unattainable: None, run: dimensions },
        Criterion { id: "08", title: "basis membership", budget: Duration::from_secs(120), unattainable: None, run: basis_membership },
        Criterion { id: "09", title: "slice and projection formulas", budget: Duration::from_secs(600), unattainable: None, run: integral_geometry },
        Criterion { id: "10", title: "Steiner coefficient nonnegativity", budget: Duration::from_secs(60), unattainable: None, run: nonnegativity },
        Criterion { id: "11", title: "mixed moment coefficient", budget: Duration::from_secs(120), unattainable: None, run: mixed_moment_criterion },
        Criterion {
            id: "12",
            title: "monotonicity",
            budget: Duration::from_secs(60),
            unattainable: Some("for intervals containing 0 every derivative is a positive combination of a^r + b^r, so no j=2 counterexample exists there"),
            run: monotonicity,
        },
        Criterion { id: "13", title: "reflection sign law", budget: Duration::from_secs(30), unattainable: None, run: reflection_law },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok && elapsed <= c.budget, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let note = match (ok, c.unattainable) {
            (false, Some(why)) => format!(" [unattainable: {why}]"),
            _ => String::new(),
        };
        println!(
            "[{}] {} {} ({:.2} s, budget {} s): {detail}{note}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
        if !ok && c.unattainable.is_none() {
            failures += 1;
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} attainable criteria failed");
        ExitCode::FAILURE
    }
}
