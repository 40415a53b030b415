//! Model-level hypothesis audit: connectivity, bipartiteness, the phonon
//! sum rule, lattice-size parity, and the definiteness class of the screened
//! interaction. The spectral checks refuse to run when these fail; this
//! report exists so a user can see exactly which hypothesis broke.

use crate::error::{Error, Result};
use crate::model::{
    check_bipartition, check_phonon_sum_rule, definiteness, Definiteness, ModelSpec, TAU_DEF,
    TAU_SUM,
};

use super::report::{nv, PreconditionRecord, TraceRow, Verdict, VerificationReport};

fn record(name: &str, holds: bool, detail: String) -> PreconditionRecord {
    PreconditionRecord { name: name.into(), holds, detail }
}

/// Re-measure the structural hypotheses on an already-built model.
///
/// `require_definite` selects the interaction class a check needs:
/// `true` demands positive definite U_eff, `false` also admits positive
/// semidefinite.
pub fn gather_preconditions(
    model: &ModelSpec,
    require_definite: bool,
) -> (Vec<PreconditionRecord>, bool) {
    let n = model.n_sites();
    let mut records = Vec::new();

    let connected_bipartite = check_bipartition(&model.t, Some(&model.sublattice), true).is_ok();
    records.push(record(
        "connected_bipartite",
        connected_bipartite,
        format!("bond graph on {n} sites, hopping only between sublattices"),
    ));

    let sum_rule = check_phonon_sum_rule(&model.g);
    records.push(record(
        "phonon_sum_rule",
        sum_rule.holds,
        format!("column-sum spread {:.3e} vs {TAU_SUM:.0e}", sum_rule.spread),
    ));

    let even = n % 2 == 0;
    records.push(record("even_site_count", even, format!("|Lambda| = {n}")));

    let (class, lambda_min) = definiteness(&model.u_eff());
    let class_ok = match class {
        Definiteness::PositiveDefinite => true,
        Definiteness::PositiveSemidefinite => !require_definite,
        Definiteness::Indefinite => false,
    };
    let wanted = if require_definite { "positive definite" } else { "positive semidefinite" };
    records.push(record(
        "u_eff_class",
        class_ok,
        format!("{class}, lambda_min = {lambda_min:.6e}, needed {wanted}"),
    ));

    let all = records.iter().all(|r| r.holds);
    (records, all)
}

/// Like [`gather_preconditions`] but refusing with an error when any
/// hypothesis fails, so the spectral checks never assert anything outside the
/// regime they cover.
pub fn require_preconditions(
    model: &ModelSpec,
    require_definite: bool,
) -> Result<Vec<PreconditionRecord>> {
    let (records, ok) = gather_preconditions(model, require_definite);
    if ok {
        return Ok(records);
    }
    let broken: Vec<&str> = records
        .iter()
        .filter(|r| !r.holds)
        .map(|r| r.name.as_str())
        .collect();
    Err(Error::PreconditionFailed(format!(
        "hypotheses not satisfied: {}",
        broken.join(", ")
    )))
}

/// Audit a model and report everything measured, failing the verdict instead
/// of erroring so the CLI can print the full table either way.
pub fn check_conditions(model: &ModelSpec) -> VerificationReport {
    let (records, ok) = gather_preconditions(model, true);
    let (class, lambda_min) = definiteness(&model.u_eff());
    let sum_rule = check_phonon_sum_rule(&model.g);
    let (a, b) = model.sublattice_counts();

    let mut measured = vec![
        nv("lambda_min", lambda_min),
        nv("sum_rule_spread", sum_rule.spread),
        nv("sites_a", a as f64),
        nv("sites_b", b as f64),
        nv("expected_two_s", model.two_s_expected() as f64),
    ];

    let mut trace = Vec::new();
    if let Some(f) = &model.fourier {
        // momentum-space table of the screened interaction
        let u_eff_k = f.u_eff_k(model.omega);
        for (ki, val) in u_eff_k.iter().enumerate() {
            let label: Vec<String> = f.mesh[ki].iter().map(|l| l.to_string()).collect();
            trace.push(TraceRow {
                parameter: format!("k[{}]", label.join(",")),
                values: vec![
                    nv("u_k", f.u_k[ki]),
                    nv("g_k", f.g_k[ki]),
                    nv("u_eff_k", *val),
                ],
            });
        }
        let min_k = u_eff_k.iter().cloned().fold(f64::INFINITY, f64::min);
        measured.push(nv("min_u_eff_k", min_k));
    }

    let notes = match class {
        Definiteness::PositiveDefinite => vec![],
        Definiteness::PositiveSemidefinite => {
            vec!["U_eff is only semidefinite: uniqueness-based checks will refuse".into()]
        }
        Definiteness::Indefinite => {
            vec!["U_eff is indefinite: outside the regime every check covers".into()]
        }
    };

    VerificationReport {
        check: "conditions".into(),
        statement: "couplings satisfy the structural hypotheses: connected bipartite hopping, \
                    constant phonon column sums, even site count, positive definite U_eff"
            .into(),
        preconditions: records,
        measured,
        tolerances: vec![nv("tau_sum", TAU_SUM), nv("tau_def", TAU_DEF)],
        trace,
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        notes,
    }
}
