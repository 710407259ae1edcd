use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rotval::random::BodyClass;
use rotval::verify::Group;

#[derive(Parser, Debug)]
#[command(
    name = "rotval",
    version,
    about = "Rotation-invariant polynomial valuations on convex polytopes",
    long_about = "Evaluate rotation-invariant polynomial valuations on convex polytopes and check \
                  their identities numerically.\n\nExit status: 0 when every verdict passes, 1 when \
                  some verdict fails, 2 on usage or input errors."
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Global {
    /// Seed for every random choice. Required by verify, fit, crofton,
    /// project-formula, ineq and oracle.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads. With 1 the output is bit-reproducible.
    #[arg(long, global = true, default_value_t = 1, value_parser = parse_threads)]
    pub threads: usize,

    /// Override a tolerance (repeatable). Names: residual, overflow, unit
    /// (verify); residual (translate, fit); sigmas (oracle).
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE", value_parser = parse_tol)]
    pub tol: Vec<(String, f64)>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Output format. CSV is a flat projection of the JSON report.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct BodyVal {
    /// Polytope file: `{"dim": d, "vertices": [[...], ...]}`.
    #[arg(long, value_name = "PATH")]
    pub body: PathBuf,

    /// Valuation, inline JSON such as `{"kind":"xi","p":2,"q":0}` or a path
    /// to a file holding it.
    #[arg(long, value_name = "JSON|PATH")]
    pub val: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Value of a valuation on a body.
    Eval(BodyVal),

    /// Coefficients c_j of eps -> phi(K + eps B), with the derivative
    /// valuations j! c_j.
    Steiner(BodyVal),

    /// Polynomial x -> phi(K + x) and its degree law.
    Translate {
        #[command(flatten)]
        input: BodyVal,
        /// Fit degree (default: the degree of the valuation).
        #[arg(long)]
        degree: Option<u32>,
        /// Use the j-th derivative valuation instead of phi.
        #[arg(long, value_name = "J")]
        derivative: Option<usize>,
    },

    /// Identity checks on random bodies; prints an array of fit reports.
    Verify(VerifyArgs),

    /// Dimensions of the spaces of invariant valuations.
    Dims {
        /// O for the orthogonal group, SO for plane rotations.
        #[arg(long, value_enum, ignore_case = true, default_value = "O")]
        group: GroupArg,
        /// Largest dimension.
        #[arg(long, default_value_t = 5)]
        dmax: usize,
        /// Largest level.
        #[arg(long, default_value_t = 10)]
        lmax: u32,
    },

    /// Least-squares expansion of a valuation in the enumerated basis.
    Fit(FitArgs),

    /// Averages of a valuation over random affine sections.
    Crofton(SectionArgs),

    /// Averages of a valuation over random projections.
    #[command(name = "project-formula")]
    ProjectFormula(SectionArgs),

    /// Randomized scans for the nonnegativity and monotonicity statements.
    Ineq(IneqArgs),

    /// Exact value against a Monte Carlo estimate.
    Oracle {
        #[command(flatten)]
        input: BodyVal,
        /// Number of samples.
        #[arg(long, default_value_t = 200_000)]
        n: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    /// phi(P) = phi(P+) + phi(P-) - phi(P cap H) for random cuts.
    Additivity,
    /// lambda -> phi(sum lambda_i K_i) is a polynomial of degree d + l.
    Minkowski,
    /// phi is unchanged by random rotations (psi picks up the reflection sign).
    Invariance,
    /// Each basis element is recovered as a unit vector.
    Basis,
    /// x -> phi(K + x) is a polynomial of the stated degree.
    Degree,
    /// xi(1,q) = (d + 2q) moment(q).
    MomentIdentity,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Which identity to check.
    #[arg(value_enum)]
    pub check: Check,
    /// Ambient dimension.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Number of random trials. Without --val the trials cycle through the
    /// standard descriptor families.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Restrict to one valuation.
    #[arg(long, value_name = "JSON|PATH")]
    pub val: Option<String>,
    /// Top level for `basis`.
    #[arg(long, default_value_t = 2)]
    pub lmax: u32,
    /// Symmetry group for `basis`.
    #[arg(long, value_enum, ignore_case = true, default_value = "O")]
    pub group: GroupArg,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Valuation to expand.
    #[arg(long, value_name = "JSON|PATH")]
    pub val: String,
    /// Expand K -> phi(K + eps B) instead of phi.
    #[arg(long, value_name = "EPS")]
    pub shift: Option<f64>,
    /// Ambient dimension.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Top level of the basis.
    #[arg(long, default_value_t = 2)]
    pub lmax: u32,
    /// O for the orthogonal group, SO for plane rotations.
    #[arg(long, value_enum, ignore_case = true, default_value = "O")]
    pub group: GroupArg,
    /// Number of random bodies.
    #[arg(long, default_value_t = 12)]
    pub bodies: usize,
}

#[derive(Args, Debug)]
pub struct SectionArgs {
    /// Ambient dimension.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Plane dimension.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Derivative order; all orders 0..=k+3 when omitted.
    #[arg(long)]
    pub j: Option<usize>,
    /// Planes per body.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    /// Number of random bodies, when --family is not given.
    #[arg(long, default_value_t = 6)]
    pub bodies: usize,
    /// JSON array of polytopes to use instead of random bodies.
    #[arg(long, value_name = "PATH")]
    pub family: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    /// Nonnegativity of the moment expansions of bodies containing 0.
    #[value(name = "6.1")]
    Nonnegativity,
    /// Mixed coefficient of |s|^2 on four bodies: segments and zonotopes.
    #[value(name = "6.2")]
    Mixed,
    /// Nested pairs against the derivative valuations.
    Monotonicity,
}

#[derive(Args, Debug)]
pub struct IneqArgs {
    /// Which statement to scan.
    #[arg(long, value_enum)]
    pub theorem: Theorem,
    /// Moment order (6.1: all of 0..=2 when omitted; monotonicity: default 1).
    #[arg(long)]
    pub q: Option<u32>,
    /// Ambient dimension (6.1 and monotonicity).
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Random bodies or tuples per scan.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Derivative order for monotonicity.
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    /// Body class for monotonicity.
    #[arg(long, value_enum, default_value = "origin-containing")]
    pub class: ClassArg,
    /// Most segments per zonotope in the 6.2 scan.
    #[arg(long, default_value_t = 4)]
    pub segments: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GroupArg {
    #[value(name = "O")]
    O,
    #[value(name = "SO")]
    So,
}

impl From<GroupArg> for Group {
    fn from(g: GroupArg) -> Group {
        match g {
            GroupArg::O => Group::O,
            GroupArg::So => Group::SO,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    OriginContaining,
    Symmetric,
}

impl From<ClassArg> for BodyClass {
    fn from(c: ClassArg) -> BodyClass {
        match c {
            ClassArg::OriginContaining => BodyClass::OriginContaining,
            ClassArg::Symmetric => BodyClass::Symmetric,
        }
    }
}

fn parse_threads(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("expected an integer >= 1, got `{s}`")),
    }
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let v: f64 = value.parse().map_err(|_| format!("`{value}` is not a number"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(format!("tolerance `{name}` must be positive and finite"));
    }
    Ok((name.trim().to_string(), v))
}
