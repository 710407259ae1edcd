use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geom::PolytopeSpec;

/// Outcome of a randomized experiment or scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub seed: u64,
    /// Samples (planes, trials) per estimate.
    pub samples: usize,
    /// Per-body (or per-trial) estimates.
    pub estimates: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Regression features, if a regression was run.
    pub features: Vec<String>,
    pub coefficients: Vec<f64>,
    pub coefficient_stderr: Vec<f64>,
    pub residuals: Vec<f64>,
    /// The quantity compared against `threshold`.
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
}

/// A recorded counterexample, with the bodies needed to replay it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: usize,
    pub bodies: Vec<PolytopeSpec>,
    pub values: Vec<f64>,
    pub note: String,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>, seed: u64, samples: usize) -> Self {
        ExperimentReport {
            name: name.into(),
            seed,
            samples,
            estimates: vec![],
            stderr: vec![],
            features: vec![],
            coefficients: vec![],
            coefficient_stderr: vec![],
            residuals: vec![],
            residual: 0.0,
            threshold: 0.0,
            pass: true,
            details: BTreeMap::new(),
            violations: vec![],
        }
    }

    pub fn with_detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }
}
