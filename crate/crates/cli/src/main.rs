mod args;
mod commands;
mod io;

use std::fs;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::{Ctx, Tolerances};
use io::{CliResult, Report, UsageError};

fn accepted_tolerances(cmd: &Command) -> (&'static str, &'static [&'static str]) {
    match cmd {
        Command::Verify(_) => ("verify", &["residual", "overflow", "unit"]),
        Command::Translate { .. } => ("translate", &["residual"]),
        Command::Fit(_) => ("fit", &["residual"]),
        Command::Oracle { .. } => ("oracle", &["sigmas"]),
        Command::Eval(_) => ("eval", &[]),
        Command::Steiner(_) => ("steiner", &[]),
        Command::Dims { .. } => ("dims", &[]),
        Command::Crofton(_) => ("crofton", &[]),
        Command::ProjectFormula(_) => ("project-formula", &[]),
        Command::Ineq(_) => ("ineq", &[]),
    }
}

fn run(cli: &Cli) -> CliResult<Report> {
    let (name, allowed) = accepted_tolerances(&cli.command);
    let ctx = Ctx {
        seed: cli.global.seed,
        tol: Tolerances::new(&cli.global.tol, name, allowed)?,
        format: cli.global.format,
    };
    match &cli.command {
        Command::Eval(a) => commands::eval(&ctx, a),
        Command::Steiner(a) => commands::steiner(&ctx, a),
        Command::Translate { input, degree, derivative } => commands::translate(&ctx, input, *degree, *derivative),
        Command::Verify(a) => commands::verify(&ctx, a),
        Command::Dims { group, dmax, lmax } => commands::dims(&ctx, *group, *dmax, *lmax),
        Command::Fit(a) => commands::fit(&ctx, a),
        Command::Crofton(a) => commands::sections(&ctx, a, false),
        Command::ProjectFormula(a) => commands::sections(&ctx, a, true),
        Command::Ineq(a) => commands::ineq(&ctx, a),
        Command::Oracle { input, n } => commands::oracle(&ctx, input, *n),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // Only fails if a pool already exists, which cannot happen here.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.global.threads).build_global();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match &cli.global.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &report.text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{}", report.text),
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
