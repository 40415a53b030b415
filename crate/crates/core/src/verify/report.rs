//! Structured check results. Every check in this module family produces a
//! [`VerificationReport`]: what was claimed, what was measured, at which
//! tolerances, with the cutoff-convergence trace that backs the verdict.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The measurements did not settle on the supplied grids; nothing is
    /// asserted either way.
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail => write!(f, "fail"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

/// Shorthand constructor used throughout the checks.
pub fn nv(name: impl Into<String>, value: f64) -> NamedValue {
    NamedValue { name: name.into(), value }
}

#[derive(Clone, Debug, Serialize)]
pub struct PreconditionRecord {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

/// One grid point of a convergence trace, labeled by the swept parameter.
#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    pub parameter: String,
    pub values: Vec<NamedValue>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    /// Stable identifier of the check, e.g. "uniqueness" or "sign_pattern".
    pub check: String,
    /// Human sentence stating what a pass means.
    pub statement: String,
    pub preconditions: Vec<PreconditionRecord>,
    /// Final-grid measurements the verdict was decided on.
    pub measured: Vec<NamedValue>,
    pub tolerances: Vec<NamedValue>,
    /// Per-grid-point history of the decisive quantities.
    pub trace: Vec<TraceRow>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.measured.iter().find(|m| m.name == name).map(|m| m.value)
    }
}
