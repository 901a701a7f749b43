//! Structured pass/fail records shared by all suites.

use serde::Serialize;

/// One measured case inside a suite.
#[derive(Debug, Clone, Serialize)]
pub struct CaseRecord {
    pub label: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Structured outcome of one verification suite.
///
/// `pass` holds exactly when `worst_residual <= tolerance` and every
/// per-case predicate holds.  Suites whose natural figure of merit is a
/// margin (bigger is better) store its negation as the residual so the same
/// invariant applies.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub pass: bool,
    pub samples: usize,
    pub worst_residual: f64,
    pub tolerance: f64,
    pub conventions: Vec<String>,
    pub details: Vec<CaseRecord>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, tolerance: f64) -> Self {
        Self {
            suite: suite.into(),
            pass: false,
            samples: 0,
            worst_residual: f64::NEG_INFINITY,
            tolerance,
            conventions: super::conventions(),
            details: Vec::new(),
        }
    }

    pub fn record(&mut self, label: impl Into<String>, measured: f64, bound: f64, pass: bool) {
        self.details.push(CaseRecord { label: label.into(), measured, bound, pass });
    }

    /// Records a case whose predicate is `measured <= bound` and folds the
    /// measurement into the worst residual.
    pub fn record_residual(&mut self, label: impl Into<String>, residual: f64, bound: f64) {
        self.worst_residual = self.worst_residual.max(residual);
        self.record(label, residual, bound, residual <= bound);
    }

    pub fn add_samples(&mut self, n: usize) {
        self.samples += n;
    }

    pub fn finish(mut self) -> Self {
        if self.worst_residual == f64::NEG_INFINITY {
            self.worst_residual = 0.0;
        }
        self.pass =
            self.worst_residual <= self.tolerance && self.details.iter().all(|c| c.pass);
        self
    }

    /// One human-readable pass/fail line.
    pub fn summary_line(&self) -> String {
        format!(
            "{}: {} (worst residual {:.3e}, tolerance {:.3e}, {} samples)",
            self.suite,
            if self.pass { "PASS" } else { "FAIL" },
            self.worst_residual,
            self.tolerance,
            self.samples
        )
    }
}
