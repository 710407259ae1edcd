//! Reading bodies and descriptors; writing reports.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rotval::geom::{build_polytope, Polytope, PolytopeSpec};
use rotval::valuation::Descriptor;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::args::Format;

/// Failure that ends the run with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<rotval::Error> for UsageError {
    fn from(e: rotval::Error) -> Self {
        UsageError(e.to_string())
    }
}

pub type CliResult<T> = Result<T, UsageError>;

fn parse_json<T: DeserializeOwned>(text: &str, source: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let msg = full.rsplit_once(" at line ").map_or(full.as_str(), |(m, _)| m);
        UsageError(format!("{source}: malformed JSON at line {}, column {}: {msg}", e.line(), e.column()))
    })
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))
}

pub fn read_body(path: &Path) -> CliResult<Polytope> {
    let spec: PolytopeSpec = parse_json(&read_file(path)?, &path.display().to_string())?;
    Ok(build_polytope(&spec.vertices, spec.dim)?)
}

pub fn read_family(path: &Path) -> CliResult<Vec<Polytope>> {
    let specs: Vec<PolytopeSpec> = parse_json(&read_file(path)?, &path.display().to_string())?;
    specs
        .iter()
        .map(|s| build_polytope(&s.vertices, s.dim).map_err(UsageError::from))
        .collect()
}

/// `--val` is inline JSON when it starts with `{`, a path otherwise.
pub fn read_descriptor(arg: &str) -> CliResult<Descriptor> {
    if arg.trim_start().starts_with('{') {
        parse_json(arg, "--val")
    } else {
        parse_json(&read_file(&PathBuf::from(arg))?, arg)
    }
}

/// Flat table for CSV output.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: vec![],
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }
}

/// A finished report: the rendered text and the overall verdict.
pub struct Report {
    pub text: String,
    pub pass: bool,
}

/// Renders `value`, after checking that the JSON parses back into the
/// same value.
pub fn render<T>(value: &T, pass: bool, table: Table, format: Format) -> CliResult<Report>
where
    T: Serialize + DeserializeOwned + PartialEq,
{
    let json = serde_json::to_string_pretty(value).map_err(|e| UsageError(format!("cannot encode report: {e}")))?;
    let back: T = serde_json::from_str(&json).map_err(|e| UsageError(format!("report does not match its schema: {e}")))?;
    if back != *value {
        return Err(UsageError("report changed in a JSON round trip".into()));
    }
    let text = match format {
        Format::Json => json + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(vec![]);
            let err = |e: csv::Error| UsageError(format!("cannot write CSV: {e}"));
            w.write_record(&table.header).map_err(err)?;
            for r in &table.rows {
                w.write_record(r).map_err(err)?;
            }
            let bytes = w.into_inner().map_err(|e| UsageError(format!("cannot write CSV: {e}")))?;
            String::from_utf8(bytes).expect("CSV output is UTF-8")
        }
    };
    Ok(Report { text, pass })
}

pub fn num(x: f64) -> String {
    format!("{x:?}")
}
