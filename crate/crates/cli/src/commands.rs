use std::collections::BTreeMap;

use rand::Rng;
use rotval::fit::FitReport;
use rotval::geom::{monte_carlo_oracle, McEstimate, McTarget, Polytope, PolytopeSpec};
use rotval::inequalities::{monotonicity_scan, nonneg_scan, segment_scan, zonotope_scan};
use rotval::intgeo::{crofton_experiment, crofton_sweep, projection_experiment, projection_sweep};
use rotval::linalg::random_orthogonal;
use rotval::random::{random_cut, random_polytope, rng_for};
use rotval::report::ExperimentReport;
use rotval::valuation::{
    derivative_translation_polynomial, evaluate, evaluate_on_parallel_body, steiner_coefficients,
    translation_polynomial, Descriptor, EpsilonPolynomial, TranslationPolynomial, TRANSLATION_RESIDUAL,
};
use rotval::verify::{
    basis_self_fit, check_additivity, check_invariance, check_minkowski_polynomiality, dimension_table,
    fit_in_basis, BasisFit, DimensionTable,
};
use serde::{Deserialize, Serialize};

use crate::args::{BodyVal, Check, FitArgs, Format, IneqArgs, SectionArgs, Theorem, VerifyArgs};
use crate::io::{num, read_body, read_descriptor, read_family, render, CliResult, Report, Table, UsageError};

/// `--tol` overrides, checked against the names a subcommand accepts.
pub struct Tolerances(BTreeMap<String, f64>);

impl Tolerances {
    pub fn new(pairs: &[(String, f64)], command: &str, allowed: &[&str]) -> CliResult<Self> {
        let mut map = BTreeMap::new();
        for (name, v) in pairs {
            if !allowed.contains(&name.as_str()) {
                let names = if allowed.is_empty() { "none".to_string() } else { allowed.join(", ") };
                return Err(UsageError(format!("unknown tolerance `{name}` for {command} (accepted: {names})")));
            }
            map.insert(name.clone(), *v);
        }
        Ok(Tolerances(map))
    }

    fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub struct Ctx {
    pub seed: Option<u64>,
    pub tol: Tolerances,
    pub format: Format,
}

impl Ctx {
    fn seed(&self, command: &str) -> CliResult<u64> {
        self.seed
            .ok_or_else(|| UsageError(format!("{command} is randomized and needs an explicit --seed")))
    }
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

fn families(d: usize) -> Vec<Descriptor> {
    let mut out = vec![
        Descriptor::moment(0),
        Descriptor::moment(1),
        Descriptor::xi(0, 0),
        Descriptor::xi(1, 0),
        Descriptor::xi(0, 1),
        Descriptor::xi(1, 1),
        Descriptor::xi(2, 0),
        Descriptor::xi(3, 0),
        Descriptor::xi(2, 1),
    ];
    if d == 2 {
        out.extend([Descriptor::psi(1, 0), Descriptor::psi(0, 1), Descriptor::psi(2, 1), Descriptor::psi(1, 2)]);
    }
    out
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct EvalReport {
    valuation: String,
    descriptor: Descriptor,
    value: f64,
}

pub fn eval(ctx: &Ctx, a: &BodyVal) -> CliResult<Report> {
    let desc = read_descriptor(&a.val)?;
    let body = read_body(&a.body)?;
    let r = EvalReport {
        valuation: desc.to_string(),
        descriptor: desc,
        value: evaluate(&desc, &body)?,
    };
    let mut t = Table::new(&["valuation", "value"]);
    t.row(vec![r.valuation.clone(), num(r.value)]);
    render(&r, true, t, ctx.format)
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct SteinerReport {
    valuation: String,
    descriptor: Descriptor,
    /// `coeffs[j]` is the raw coefficient of `ε^j`; `derivatives[j] = j! coeffs[j]`.
    expansion: EpsilonPolynomial,
}

pub fn steiner(ctx: &Ctx, a: &BodyVal) -> CliResult<Report> {
    let desc = read_descriptor(&a.val)?;
    let body = read_body(&a.body)?;
    let r = SteinerReport {
        valuation: desc.to_string(),
        descriptor: desc,
        expansion: steiner_coefficients(&desc, &body)?,
    };
    let mut t = Table::new(&["j", "coefficient", "derivative"]);
    for (j, (c, dv)) in r.expansion.coeffs.iter().zip(&r.expansion.derivatives).enumerate() {
        t.row(vec![j.to_string(), num(*c), num(*dv)]);
    }
    render(&r, true, t, ctx.format)
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct TranslateReport {
    valuation: String,
    descriptor: Descriptor,
    derivative: Option<usize>,
    threshold: f64,
    pass: bool,
    fit: TranslationPolynomial,
}

pub fn translate(ctx: &Ctx, a: &BodyVal, degree: Option<u32>, derivative: Option<usize>) -> CliResult<Report> {
    let desc = read_descriptor(&a.val)?;
    let body = read_body(&a.body)?;
    let ell = degree.unwrap_or_else(|| desc.degree());
    let fit = match derivative {
        Some(j) => derivative_translation_polynomial(&desc, j, &body, ell)?,
        None => translation_polynomial(&desc, &body, ell)?,
    };
    let threshold = ctx.tol.get("residual").unwrap_or(TRANSLATION_RESIDUAL);
    let pass = fit.residual <= threshold && fit.residual <= 10.0 * fit.refit_residual + 1e-12;
    let r = TranslateReport {
        valuation: desc.to_string(),
        descriptor: desc,
        derivative,
        threshold,
        pass,
        fit,
    };
    let mut t = Table::new(&["exponent", "coefficient"]);
    for (e, c) in r.fit.poly.terms() {
        let e: Vec<String> = e.iter().map(u32::to_string).collect();
        t.row(vec![e.join(" "), num(*c)]);
    }
    render(&r, pass, t, ctx.format)
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn degree_report(desc: &Descriptor, k: &Polytope) -> CliResult<FitReport> {
    let ell = desc.degree();
    let t = translation_polynomial(desc, k, ell)?;
    let d = k.dim();
    let shape = (t.nodes_per_axis.pow(d as u32), binomial(d + ell as usize, d));
    let coeffs = t.poly.terms().map(|(_, c)| *c).collect();
    let mut r = FitReport::new(format!("degree {desc}"), shape, coeffs, t.residual, t.condition, TRANSLATION_RESIDUAL)
        .with_detail("degree", ell as f64)
        .with_detail("refit_residual", t.refit_residual)
        .require("refit_gains_nothing", t.residual <= 10.0 * t.refit_residual + 1e-12);
    if let Some(lower) = t.lower_residual {
        r = r.with_detail("lower_residual", lower).require("degree_is_exact", lower > 1e-6);
    }
    Ok(r)
}

/// Recomputes the verdict when tolerances were overridden.
fn retune(r: &mut FitReport, tol: &Tolerances) {
    if tol.is_empty() {
        return;
    }
    if let Some(t) = tol.get("residual") {
        r.threshold = t;
    }
    let side = |key: &str, name: &str| match r.details.get(key) {
        Some(v) => *v <= tol.get(name).unwrap_or(1e-6),
        None => true,
    };
    let extra_ok = side("overflow", "overflow") && side("unit_error", "unit");
    let others_ok = ["refit_gains_nothing", "degree_is_exact"]
        .iter()
        .all(|k| r.details.get(*k).is_none_or(|v| *v == 1.0));
    r.pass = r.residual.is_finite() && r.residual <= r.threshold && extra_ok && others_ok;
}

pub fn verify(ctx: &Ctx, a: &VerifyArgs) -> CliResult<Report> {
    let seed = ctx.seed("verify")?;
    let d = a.dim;
    if !(1..=3).contains(&d) && a.check != Check::Basis {
        return Err(UsageError(format!("--dim must be 1, 2 or 3, got {d}")));
    }
    let descs = match &a.val {
        Some(v) => vec![read_descriptor(v)?],
        None => families(d),
    };
    let pick = |i: usize| descs[i % descs.len()];
    let mut reports = Vec::new();
    match a.check {
        Check::Additivity => {
            for (i, k) in bodies(d, a.trials, seed).iter().enumerate() {
                let h = random_cut(k, &mut rng_for(seed.wrapping_add(1), i as u64));
                reports.push(check_additivity(&pick(i), k, &h)?);
            }
        }
        Check::Minkowski => {
            for i in 0..a.trials {
                let mut rng = rng_for(seed, i as u64);
                let count = 1 + i % 3;
                let ks: Vec<Polytope> = (0..count)
                    .map(|_| {
                        let n = rng.random_range(d + 1..=d + 3);
                        random_polytope(d, n, &mut rng)
                    })
                    .collect();
                let desc = pick(i);
                reports.push(check_minkowski_polynomiality(&desc, &ks, desc.degree())?);
            }
        }
        Check::Invariance => {
            for (i, k) in bodies(d, a.trials, seed).iter().enumerate() {
                let mut rng = rng_for(seed.wrapping_add(1), i as u64);
                let maps: Vec<_> = (0..8).map(|m| random_orthogonal(d, m % 2 == 0, &mut rng)).collect();
                reports.push(check_invariance(&pick(i), k, &maps)?);
            }
        }
        Check::Basis => {
            let count = a.trials.max(1);
            for (_, r) in basis_self_fit(d, a.lmax, &bodies(d, count, seed), a.group.into(), seed)? {
                reports.push(r);
            }
        }
        Check::Degree => {
            for (i, k) in bodies(d, a.trials, seed).iter().enumerate() {
                reports.push(degree_report(&pick(i), k)?);
            }
        }
        Check::MomentIdentity => {
            for k in bodies(d, a.trials, seed) {
                for q in 0..=2 {
                    let lhs = evaluate(&Descriptor::xi(1, q), &k)?;
                    let rhs = (d as f64 + 2.0 * q as f64) * evaluate(&Descriptor::moment(q), &k)?;
                    let rel = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
                    reports.push(
                        FitReport::check(format!("xi(1,{q}) = (d+2q) moment({q})"), rel, 1e-9)
                            .with_detail("xi", lhs)
                            .with_detail("moment_term", rhs),
                    );
                }
            }
        }
    }
    for r in &mut reports {
        retune(r, &ctx.tol);
    }
    let pass = reports.iter().all(|r| r.pass);
    let mut t = Table::new(&["name", "residual", "threshold", "condition", "pass"]);
    for r in &reports {
        t.row(vec![r.name.clone(), num(r.residual), num(r.threshold), num(r.condition), r.pass.to_string()]);
    }
    render(&reports, pass, t, ctx.format)
}

pub fn dims(ctx: &Ctx, group: crate::args::GroupArg, dmax: usize, lmax: u32) -> CliResult<Report> {
    let table: DimensionTable = dimension_table(dmax, lmax, group.into())?;
    let mut t = Table::new(&["d", "ell", "increment", "cumulative", "enumerated"]);
    for e in &table.entries {
        t.row(vec![
            e.d.to_string(),
            e.ell.to_string(),
            e.increment.to_string(),
            e.cumulative.to_string(),
            e.enumerated.to_string(),
        ]);
    }
    let pass = table.consistent();
    render(&table, pass, t, ctx.format)
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct FitOutput {
    valuation: String,
    descriptor: Descriptor,
    shift: Option<f64>,
    fit: BasisFit,
}

pub fn fit(ctx: &Ctx, a: &FitArgs) -> CliResult<Report> {
    let seed = ctx.seed("fit")?;
    let desc = read_descriptor(&a.val)?;
    if let Some(eps) = a.shift {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(UsageError(format!("--shift must be a nonnegative number, got {eps}")));
        }
    }
    let ks = bodies(a.dim, a.bodies, seed);
    let target = |k: &Polytope| match a.shift {
        Some(eps) => evaluate_on_parallel_body(&desc, k, eps),
        None => evaluate(&desc, k),
    };
    let mut result = fit_in_basis(target, a.dim, a.lmax, &ks, a.group.into(), seed.wrapping_add(1))?;
    retune(&mut result.report, &ctx.tol);
    let pass = result.report.pass;
    let mut t = Table::new(&["element", "coefficient"]);
    for (e, c) in result.elements.iter().zip(&result.report.coefficients) {
        t.row(vec![e.to_string(), num(*c)]);
    }
    let out = FitOutput {
        valuation: desc.to_string(),
        descriptor: desc,
        shift: a.shift,
        fit: result,
    };
    render(&out, pass, t, ctx.format)
}

pub fn sections(ctx: &Ctx, a: &SectionArgs, project: bool) -> CliResult<Report> {
    let command = if project { "project-formula" } else { "crofton" };
    let seed = ctx.seed(command)?;
    let family = match &a.family {
        Some(path) => read_family(path)?,
        None => bodies(a.dim, a.bodies, seed.wrapping_add(1)),
    };
    let reports: Vec<ExperimentReport> = match (a.j, project) {
        (Some(j), false) => vec![crofton_experiment(&family, a.k, j, a.n, seed)?],
        (Some(j), true) => vec![projection_experiment(&family, a.k, j, a.n, seed)?],
        (None, false) => crofton_sweep(&family, a.k, a.n, seed)?,
        (None, true) => projection_sweep(&family, a.k, a.n, seed)?,
    };
    let mut t = Table::new(&["report", "body", "estimate", "stderr", "residual"]);
    for r in &reports {
        for (i, (e, s)) in r.estimates.iter().zip(&r.stderr).enumerate() {
            let res = r.residuals.get(i).map_or(String::new(), |x| num(*x));
            t.row(vec![r.name.clone(), i.to_string(), num(*e), num(*s), res]);
        }
    }
    let pass = reports.iter().all(|r| r.pass);
    render(&reports, pass, t, ctx.format)
}

pub fn ineq(ctx: &Ctx, a: &IneqArgs) -> CliResult<Report> {
    let seed = ctx.seed("ineq")?;
    let reports = match a.theorem {
        Theorem::Nonnegativity => {
            let qs: Vec<u32> = a.q.map_or_else(|| (0..=2).collect(), |q| vec![q]);
            qs.iter()
                .map(|q| nonneg_scan(*q, a.dim, a.trials, seed))
                .collect::<rotval::Result<Vec<_>>>()?
        }
        Theorem::Mixed => vec![segment_scan(a.trials, seed)?, zonotope_scan(a.trials, a.segments, seed)?],
        Theorem::Monotonicity => {
            vec![monotonicity_scan(a.j, a.q.unwrap_or(1), a.dim, a.class.into(), a.trials, seed)?]
        }
    };
    let mut t = Table::new(&["name", "samples", "residual", "threshold", "pass", "violations"]);
    for r in &reports {
        t.row(vec![
            r.name.clone(),
            r.samples.to_string(),
            num(r.residual),
            num(r.threshold),
            r.pass.to_string(),
            r.violations.len().to_string(),
        ]);
    }
    let pass = reports.iter().all(|r| r.pass);
    render(&reports, pass, t, ctx.format)
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct OracleReport {
    valuation: String,
    descriptor: Descriptor,
    body: PolytopeSpec,
    exact: f64,
    monte_carlo: McEstimate,
    sigmas: f64,
    pass: bool,
}

pub fn oracle(ctx: &Ctx, a: &BodyVal, n: usize) -> CliResult<Report> {
    let seed = ctx.seed("oracle")?;
    let desc = read_descriptor(&a.val)?;
    let body = read_body(&a.body)?;
    let d = body.dim();
    let target = match desc.interior_integrand(d) {
        Some(f) => McTarget::Interior(f),
        None => match desc.boundary_integrand(d)? {
            Some(g) => McTarget::Boundary(g),
            None => return Err(UsageError(format!("{desc} has no integrand to sample"))),
        },
    };
    let exact = evaluate(&desc, &body)?;
    let mc = monte_carlo_oracle(&body, &target, n, seed)?;
    let sigmas = ctx.tol.get("sigmas").unwrap_or(3.0);
    let pass = (mc.estimate - exact).abs() <= sigmas * mc.stderr + 1e-12 * exact.abs();
    let r = OracleReport {
        valuation: desc.to_string(),
        descriptor: desc,
        body: body.spec(),
        exact,
        monte_carlo: mc,
        sigmas,
        pass,
    };
    let mut t = Table::new(&["valuation", "exact", "estimate", "stderr", "samples", "pass"]);
    t.row(vec![
        r.valuation.clone(),
        num(exact),
        num(mc.estimate),
        num(mc.stderr),
        mc.samples.to_string(),
        pass.to_string(),
    ]);
    render(&r, pass, t, ctx.format)
}
