//! Verification reports: ordered named checks with residuals.

use std::fmt;

use serde::ser::Serializer;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Largest deviation observed by a check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Residual {
    /// Established symbolically or in exact arithmetic.
    Exact,
    Numeric(f64),
    /// The check is not residual-based.
    None,
}

impl Serialize for Residual {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Residual::Exact => s.serialize_str("exact"),
            Residual::Numeric(x) if x.is_finite() => s.serialize_f64(*x),
            Residual::Numeric(_) => s.serialize_str("non-finite"),
            Residual::None => s.serialize_none(),
        }
    }
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Residual::Exact => f.write_str("exact"),
            Residual::Numeric(x) => write!(f, "{x:.3e}"),
            Residual::None => f.write_str("-"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub max_residual: Residual,
    pub samples_used: usize,
    /// Informational checks are reported but do not affect the verdict.
    pub gating: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, status: Status) -> Self {
        Check {
            name: name.into(),
            status,
            max_residual: Residual::None,
            samples_used: 0,
            gating: true,
            detail: None,
        }
    }

    pub fn pass(name: impl Into<String>) -> Self {
        Self::new(name, Status::Pass)
    }

    pub fn fail(name: impl Into<String>) -> Self {
        Self::new(name, Status::Fail)
    }

    pub fn from_bool(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { Status::Pass } else { Status::Fail })
    }

    pub fn skipped(name: impl Into<String>, why: impl Into<String>) -> Self {
        Self::new(name, Status::Skipped).with_detail(why)
    }

    pub fn with_residual(mut self, r: Residual) -> Self {
        self.max_residual = r;
        self
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.samples_used = n;
        self
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn informational(mut self) -> Self {
        self.gating = false;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct VerificationReport {
    pub subject: String,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        VerificationReport { subject: subject.into(), checks: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    pub fn extend(&mut self, prefix: &str, other: VerificationReport) {
        for mut c in other.checks {
            c.name = format!("{prefix}{}", c.name);
            self.checks.push(c);
        }
        self.notes.extend(other.notes);
    }

    /// Conjunction over gating checks; skipped checks do not fail a report.
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| !c.gating || c.status != Status::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| c.gating && c.status == Status::Fail)
            .map(|c| c.name.as_str())
            .collect()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.subject, if self.passed() { "PASS" } else { "FAIL" })?;
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skip",
            };
            write!(f, "  [{tag}] {}", c.name)?;
            if c.max_residual != Residual::None {
                write!(f, "  residual={}", c.max_residual)?;
            }
            if c.samples_used > 0 {
                write!(f, "  samples={}", c.samples_used)?;
            }
            if !c.gating {
                f.write_str("  (informational)")?;
            }
            if let Some(d) = &c.detail {
                write!(f, "  {d}")?;
            }
            writeln!(f)?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}
