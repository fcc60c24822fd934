//! Result-reporting types shared by the experiment layer, the acceptance
//! suite, and the command-line front end.
//!
//! Every reported number carries how it was produced ([`Provenance`]) and,
//! for stochastic estimates, the evidence for its verdict: estimate,
//! standard error, the reference value, and the rule that was applied
//! ([`OracleKind`]). Complex values serialize as `{"re": …, "im": …}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// How a reported number was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

/// JSON shape for a complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for CValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<CValue> for Complex64 {
    fn from(v: CValue) -> Self {
        Complex64::new(v.re, v.im)
    }
}

/// What the reference value of an experiment means, with the verdict rule
/// it implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OracleKind {
    /// Two-sided target: pass iff `|estimate − oracle| ≤ max(tolerance, 3σ)`.
    Equality { tolerance: f64 },
    /// One-sided bound: pass iff `estimate ≤ oracle · (1 + 3σ/estimate)`.
    UpperBound,
}

/// Outcome of one stochastic experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    /// What was estimated.
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    /// Reference value: target for equality checks, bound for inequality
    /// checks.
    pub oracle: f64,
    pub oracle_kind: OracleKind,
    pub samples: u64,
    pub seed: u64,
    pub verdict: bool,
    pub provenance: Provenance,
    /// Wall-clock duration; excluded from reproducibility comparisons and
    /// omitted from serialized output when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl ExperimentReport {
    /// Judges a two-sided estimate: pass iff
    /// `|estimate − oracle| ≤ max(tolerance, 3·std_error)`.
    pub fn equality(
        name: impl Into<String>,
        estimate: f64,
        std_error: f64,
        oracle: f64,
        tolerance: f64,
        samples: u64,
        seed: u64,
    ) -> Self {
        let verdict = (estimate - oracle).abs() <= tolerance.max(3.0 * std_error);
        Self {
            name: name.into(),
            estimate,
            std_error,
            oracle,
            oracle_kind: OracleKind::Equality { tolerance },
            samples,
            seed,
            verdict,
            provenance: Provenance::MonteCarlo,
            wall_time_ms: None,
        }
    }

    /// Judges a one-sided estimate: pass iff
    /// `estimate ≤ bound · (1 + 3·relative std error)`.
    pub fn upper_bound(
        name: impl Into<String>,
        estimate: f64,
        std_error: f64,
        bound: f64,
        samples: u64,
        seed: u64,
    ) -> Self {
        let rel_sigma = if estimate > 0.0 {
            std_error / estimate
        } else {
            0.0
        };
        let verdict = estimate <= bound * (1.0 + 3.0 * rel_sigma);
        Self {
            name: name.into(),
            estimate,
            std_error,
            oracle: bound,
            oracle_kind: OracleKind::UpperBound,
            samples,
            seed,
            verdict,
            provenance: Provenance::MonteCarlo,
            wall_time_ms: None,
        }
    }

    /// Distance to the reference in units of the standard error
    /// (`infinity` when the standard error is zero and the estimate is off).
    pub fn sigma_distance(&self) -> f64 {
        let gap = (self.estimate - self.oracle).abs();
        if gap == 0.0 {
            0.0
        } else {
            gap / self.std_error
        }
    }
}

/// One line of the acceptance table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictRow {
    pub criterion: u32,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl VerdictRow {
    pub fn new(criterion: u32, name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            criterion,
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }

    /// The one-line rendering used by the acceptance runner and `selftest`.
    pub fn render(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        format!("[{}] criterion {:2} — {}: {}", status, self.criterion, self.name, self.detail)
    }
}
