//! Structured outcomes of identity and conjecture checks.

use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimStatus {
    /// A proven identity; a failure is a bug.
    Proven,
    /// An open conjecture; passing only means consistency at the tested scale.
    Conjecture,
    /// Raw values for inspection, no claim attached.
    Informational,
}

/// One evaluated parameter point: both sides as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointResult {
    pub params: String,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl PointResult {
    pub fn compare(params: impl Into<String>, lhs: impl ToString, rhs: impl ToString) -> Self {
        let (lhs, rhs) = (lhs.to_string(), rhs.to_string());
        PointResult {
            params: params.into(),
            pass: lhs == rhs,
            lhs,
            rhs,
            witness: None,
        }
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    pub status: ClaimStatus,
    pub grid: String,
    pub outcome: String,
    pub points: Vec<PointResult>,
    pub counterexample: Option<PointResult>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Wall time; left out of serialized output unless requested, so reports stay byte-stable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn new(
        identity: impl Into<String>,
        status: ClaimStatus,
        grid: impl Into<String>,
        points: Vec<PointResult>,
    ) -> Self {
        let counterexample = points.iter().find(|p| !p.pass).cloned();
        let outcome = match (&counterexample, status) {
            (Some(_), _) => "FAIL",
            (None, ClaimStatus::Proven) => "pass",
            (None, ClaimStatus::Conjecture) => "conjecture consistent at tested scale",
            (None, ClaimStatus::Informational) => "informational",
        };
        VerificationReport {
            identity: identity.into(),
            status,
            grid: grid.into(),
            outcome: outcome.to_string(),
            points,
            counterexample,
            notes: Vec::new(),
            elapsed_ms: None,
            elapsed: Duration::ZERO,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    /// Copies the measured wall time into the serialized field.
    pub fn expose_timing(&mut self) {
        self.elapsed_ms = Some(self.elapsed.as_millis());
    }
}

/// Plain-text table, one line per report.
pub fn render_table(reports: &[VerificationReport]) -> String {
    let width = reports.iter().map(|r| r.identity.len()).max().unwrap_or(8).max(8);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:<13}  {:>6}  outcome",
        "identity", "status", "points"
    );
    for r in reports {
        let status = match r.status {
            ClaimStatus::Proven => "proven",
            ClaimStatus::Conjecture => "conjecture",
            ClaimStatus::Informational => "informational",
        };
        let _ = write!(
            out,
            "{:<width$}  {:<13}  {:>6}  {}",
            r.identity,
            status,
            r.points.len(),
            r.outcome
        );
        if let Some(c) = &r.counterexample {
            let _ = write!(out, "  [{}: lhs={} rhs={}]", c.params, c.lhs, c.rhs);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failure_carries_first_counterexample() {
        let r = VerificationReport::new(
            "demo",
            ClaimStatus::Proven,
            "two points",
            vec![PointResult::compare("k=1", 1, 1), PointResult::compare("k=2", 3, 4)],
        );
        assert!(!r.passed());
        assert_eq!(r.counterexample.as_ref().unwrap().params, "k=2");
        assert_eq!(r.outcome, "FAIL");

        let ok = VerificationReport::new("c", ClaimStatus::Conjecture, "g", vec![PointResult::compare("x", 2, 2)]);
        assert!(ok.passed());
        assert_eq!(ok.outcome, "conjecture consistent at tested scale");
        let json = serde_json::to_string(&ok).unwrap();
        assert!(!json.contains("elapsed"));
        assert!(render_table(&[r, ok]).contains("lhs=3 rhs=4"));
    }
}
