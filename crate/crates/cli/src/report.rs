//! Run reports. The JSON record is the authority; the human summary and the
//! CSV tables are pure functions of it, so a saved report can always be
//! re-rendered without re-running anything.

use serde::Serialize;

use hhed::model::{ModelSpec, Sublattice};
use hhed::solve::SweepResult;
use hhed::verify::{Verdict, VerificationReport};

#[derive(Debug, Serialize)]
pub struct ModelSummary {
    pub sites: Vec<String>,
    pub sublattice: Vec<String>,
    pub omega: f64,
    pub sites_a: usize,
    pub sites_b: usize,
    pub expected_two_s: usize,
}

impl ModelSummary {
    pub fn of(model: &ModelSpec) -> Self {
        let (a, b) = model.sublattice_counts();
        ModelSummary {
            sites: model.sites.clone(),
            sublattice: model
                .sublattice
                .iter()
                .map(|s| match s {
                    Sublattice::A => "A".to_string(),
                    Sublattice::B => "B".to_string(),
                })
                .collect(),
            omega: model.omega,
            sites_a: a,
            sites_b: b,
            expected_two_s: model.two_s_expected(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub model: ModelSummary,
    pub checks: Vec<VerificationReport>,
}

/// 0 when everything passed, 1 on any failure, 2 when the worst verdict is
/// an inconclusive one.
pub fn exit_code(checks: &[VerificationReport]) -> i32 {
    if checks.iter().any(|c| c.verdict == Verdict::Fail) {
        1
    } else if checks.iter().any(|c| c.verdict == Verdict::Inconclusive) {
        2
    } else {
        0
    }
}

/// Shortest round-trip form in a readable range, scientific outside it.
fn fmt_value(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && (a < 1e-4 || a >= 1e6) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn human_summary(report: &RunReport) -> String {
    let mut out = String::new();
    let m = &report.model;
    out.push_str(&format!(
        "model: {} sites (|A|={}, |B|={}), omega={}, expected 2S={}\n",
        m.sites.len(),
        m.sites_a,
        m.sites_b,
        m.omega,
        m.expected_two_s
    ));
    for check in &report.checks {
        out.push_str(&format!("\n[{}] {}\n", check.verdict, check.check));
        out.push_str(&format!("  statement: {}\n", check.statement));
        for p in &check.preconditions {
            if !p.holds {
                out.push_str(&format!("  precondition violated: {} ({})\n", p.name, p.detail));
            }
        }
        for v in &check.measured {
            out.push_str(&format!("  {} = {}\n", v.name, fmt_value(v.value)));
        }
        for note in &check.notes {
            out.push_str(&format!("  note: {note}\n"));
        }
    }
    let code = exit_code(&report.checks);
    let word = match code {
        0 => "pass",
        2 => "inconclusive",
        _ => "fail",
    };
    out.push_str(&format!("\noverall: {word}\n"));
    out
}

/// Columns: parameter, e0, e1, gap, degeneracy, spin_square, overlap.
/// The overlap cell is empty for sweeps that have no reference state.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from("parameter,e0,e1,gap,degeneracy,spin_square,overlap\n");
    for row in &result.rows {
        let overlap = row.overlap.map(|o| o.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.parameter, row.e0, row.e1, row.gap, row.degeneracy, row.spin_square, overlap
        ));
    }
    out
}

/// Columns: k, chi, bound. One row per mesh point the check measured; the
/// bound cell is empty where the screened interaction is not positive.
pub fn susceptibility_csv(report: &VerificationReport) -> String {
    let mut out = String::from("k,chi,bound\n");
    for v in &report.measured {
        if let Some(label) = v.name.strip_prefix("chi(").and_then(|s| s.strip_suffix(')')) {
            let bound = report
                .value(&format!("bound({label})"))
                .map(|b| b.to_string())
                .unwrap_or_default();
            out.push_str(&format!("\"{label}\",{},{bound}\n", v.value));
        }
    }
    out
}
