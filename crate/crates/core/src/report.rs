//! Pass/fail records for numerical checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One evaluated residual at a sample point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: [f64; 3],
    pub residual: Vec<f64>,
    /// Magnitude compared against the tolerance.
    pub norm: f64,
}

impl Sample {
    /// Sample whose magnitude is the Euclidean norm of the residual.
    pub fn euclidean(t: f64, x: [f64; 3], residual: Vec<f64>) -> Self {
        let norm = residual.iter().map(|r| r * r).sum::<f64>().sqrt();
        Sample { t, x, residual, norm }
    }

    /// Sample whose magnitude is the largest absolute residual component.
    pub fn sup(t: f64, x: [f64; 3], residual: Vec<f64>) -> Self {
        let norm = residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        Sample { t, x, residual, norm }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    /// The transport law the check exercises.
    pub theorem: String,
    /// Labels of the residual components, in sample order.
    pub components: Vec<String>,
    pub samples: Vec<Sample>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Named scalar diagnostics (reference values, convergence orders, ...).
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub seed: Option<u64>,
    /// Wall-clock time; not serialised, so report files stay reproducible.
    #[serde(skip)]
    pub runtime_ms: f64,
}

impl CheckReport {
    /// Builds a report; `passed` is `max_residual <= tolerance`.
    pub fn new(
        check: impl Into<String>,
        theorem: impl Into<String>,
        components: Vec<String>,
        samples: Vec<Sample>,
        tolerance: f64,
    ) -> Self {
        let max_residual = if samples.iter().any(|s| s.norm.is_nan()) {
            f64::NAN
        } else {
            samples.iter().fold(0.0f64, |m, s| m.max(s.norm))
        };
        CheckReport {
            check: check.into(),
            theorem: theorem.into(),
            components,
            samples,
            max_residual,
            tolerance,
            passed: max_residual <= tolerance,
            metrics: BTreeMap::new(),
            notes: Vec::new(),
            seed: None,
            runtime_ms: 0.0,
        }
    }

    /// A report for a check that could not run.
    pub fn failed(check: impl Into<String>, theorem: impl Into<String>, reason: impl Into<String>) -> Self {
        let mut r = CheckReport::new(check, theorem, vec![], vec![], 0.0);
        r.max_residual = f64::INFINITY;
        r.passed = false;
        r.notes.push(reason.into());
        r
    }

    pub fn with_metric(mut self, name: impl Into<String>, value: f64) -> Self {
        self.metrics.insert(name.into(), value);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}
