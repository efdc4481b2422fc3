//! Structured pass/fail output shared by every verification suite.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Not a failure, but the check could not certify its full claim
    /// (for example a degree cap over a finite field).
    Flagged,
}

/// Concrete inputs and values of one trial, enough to replay it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub trial: usize,
    pub values: BTreeMap<String, String>,
}

impl Witness {
    pub fn new(trial: usize) -> Self {
        Witness {
            trial,
            values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.values.insert(key.to_string(), value.to_string());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub trials: usize,
    /// Indices of failed trials.
    pub failures: Vec<usize>,
    pub witness: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Witnesses kept per check; failures beyond this are only counted.
const MAX_WITNESSES: usize = 8;

impl Check {
    pub fn new(name: &str) -> Self {
        Check {
            name: name.to_string(),
            status: Status::Pass,
            trials: 0,
            failures: Vec::new(),
            witness: Vec::new(),
            worst_residual: None,
            tolerance: None,
            notes: Vec::new(),
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    pub fn pass(&mut self) {
        self.trials += 1;
    }

    pub fn fail(&mut self, witness: Witness) {
        self.trials += 1;
        self.failures.push(witness.trial);
        if self.witness.len() < MAX_WITNESSES {
            self.witness.push(witness);
        }
        self.status = Status::Fail;
    }

    /// Records a residual; fails the trial when it exceeds the tolerance
    /// (or is not finite). The witness is only built on failure.
    pub fn residual(&mut self, value: f64, witness: impl FnOnce() -> Witness) -> bool {
        let worst = self.worst_residual.unwrap_or(0.0);
        if !value.is_finite() || value > worst {
            self.worst_residual = Some(if value.is_nan() { f64::INFINITY } else { value });
        } else if self.worst_residual.is_none() {
            self.worst_residual = Some(value);
        }
        let ok = value.is_finite() && self.tolerance.is_none_or(|tol| value < tol);
        if ok {
            self.pass();
        } else {
            let w = witness().with("residual", format!("{value:e}"));
            self.fail(w);
        }
        ok
    }

    pub fn flag(&mut self, note: impl Into<String>) {
        if self.status == Status::Pass {
            self.status = Status::Flagged;
        }
        self.notes.push(note.into());
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub title: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(title: &str, seed: Option<u64>) -> Self {
        VerificationReport {
            title: title.to_string(),
            seed,
            notes: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.notes.extend(other.notes);
        self.checks.extend(other.checks);
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Flagged => "FLAG",
            };
            write!(f, "  [{status}] {} ({} trials", c.name, c.trials)?;
            if let Some(r) = c.worst_residual {
                write!(f, ", worst {r:.3e}")?;
            }
            writeln!(f, ")")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_tracks_worst_and_fails_above_tolerance() {
        let mut c = Check::new("r").with_tolerance(1e-6);
        assert!(c.residual(1e-9, || Witness::new(0)));
        assert!(c.residual(1e-8, || Witness::new(1)));
        assert!(!c.residual(1e-3, || Witness::new(2).with("x", 1.5)));
        assert_eq!(c.trials, 3);
        assert_eq!(c.failures, vec![2]);
        assert_eq!(c.worst_residual, Some(1e-3));
        assert_eq!(c.witness[0].values["x"], "1.5");
        assert!(!c.passed());
    }

    #[test]
    fn nan_residual_is_a_failure() {
        let mut c = Check::new("r").with_tolerance(1.0);
        assert!(!c.residual(f64::NAN, || Witness::new(0)));
        assert_eq!(c.worst_residual, Some(f64::INFINITY));
    }

    #[test]
    fn flagged_is_not_failed() {
        let mut c = Check::new("d");
        c.pass();
        c.flag("degree cap");
        assert_eq!(c.status, Status::Flagged);
        assert!(c.passed());
    }
}
