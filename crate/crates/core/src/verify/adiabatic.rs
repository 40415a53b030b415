//! Large-frequency limit: as ω is scaled by θ → ∞ the coupled ground state
//! dresses into exp(-L)(ψ_Hubbard ⊗ vacuum), the energy approaches the plain
//! Hubbard energy, and the total spin never moves.

use crate::error::Result;
use crate::model::ModelSpec;
use crate::solve::spectrum::{SolveOptions, TAU_DEG};
use crate::solve::sweep::{theta_sweep, SweepResult};

use super::conditions::require_preconditions;
use super::report::{nv, TraceRow, Verdict, VerificationReport};
use super::spin::require_cutoff_grid;

/// Required final overlap with the dressed Hubbard ground state.
pub const OVERLAP_FLOOR: f64 = 0.99;
/// Energy agreement with the Hubbard limit at the largest θ.
pub const TAU_LIMIT_ENERGY: f64 = 1e-3;
/// Spin-square drift allowed across the whole θ grid.
pub const TAU_SPIN_DRIFT: f64 = 1e-8;
/// Cutoff-to-cutoff agreement required of the sweep endpoints.
pub const TAU_THETA_GATE: f64 = 1e-6;

fn endpoint_gates(a: &SweepResult, b: &SweepResult) -> (f64, f64, f64) {
    let first = (a.rows.first().unwrap().e0 - b.rows.first().unwrap().e0).abs();
    let last = (a.rows.last().unwrap().e0 - b.rows.last().unwrap().e0).abs();
    let overlap = (a.rows.last().unwrap().overlap.unwrap()
        - b.rows.last().unwrap().overlap.unwrap())
    .abs();
    (first, last, overlap)
}

/// Sweep θ on the last two cutoffs of the grid and check the four limit
/// statements on the converged sweep: monotone overlap reaching
/// [`OVERLAP_FLOOR`], energy within [`TAU_LIMIT_ENERGY`] of the Hubbard
/// value, positive sector gap throughout, constant total spin.
pub fn verify_adiabatic_limit(
    model: &ModelSpec,
    theta_grid: &[f64],
    cutoffs: &[usize],
    opts: &SolveOptions,
) -> Result<VerificationReport> {
    let preconditions = require_preconditions(model, true)?;
    require_cutoff_grid(cutoffs)?;
    let n = model.n_sites();

    let final_cutoff = *cutoffs.last().unwrap();
    let sweep = theta_sweep(model, n, 0, final_cutoff, theta_grid, opts)?;
    let (gate_first, gate_last, gate_overlap) = if cutoffs.len() >= 2 {
        let prev = theta_sweep(model, n, 0, cutoffs[cutoffs.len() - 2], theta_grid, opts)?;
        endpoint_gates(&prev, &sweep)
    } else {
        (f64::INFINITY, f64::INFINITY, f64::INFINITY)
    };
    let converged = gate_first <= TAU_THETA_GATE
        && gate_last <= TAU_THETA_GATE
        && gate_overlap <= TAU_THETA_GATE;

    let trace: Vec<TraceRow> = sweep
        .rows
        .iter()
        .map(|row| TraceRow {
            parameter: format!("theta={}", row.parameter),
            values: vec![
                nv("e0", row.e0),
                nv("gap", row.gap),
                nv("spin_square", row.spin_square),
                nv("overlap", row.overlap.unwrap()),
            ],
        })
        .collect();

    let overlaps: Vec<f64> = sweep.rows.iter().map(|r| r.overlap.unwrap()).collect();
    let monotone = overlaps.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let overlap_final = *overlaps.last().unwrap();
    let min_gap = sweep.rows.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min);
    let spins: Vec<f64> = sweep.rows.iter().map(|r| r.spin_square).collect();
    let spin_drift = spins.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - spins.iter().cloned().fold(f64::INFINITY, f64::min);
    let (_, e0_hubbard) = sweep.reference.clone().unwrap();
    let e0_final = sweep.rows.last().unwrap().e0;
    let limit_gap = (e0_final - e0_hubbard).abs();

    let ok = monotone
        && overlap_final >= OVERLAP_FLOOR
        && min_gap > TAU_DEG
        && spin_drift <= TAU_SPIN_DRIFT
        && limit_gap <= TAU_LIMIT_ENERGY;

    let verdict = if !converged {
        Verdict::Inconclusive
    } else if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    };

    let mut notes = Vec::new();
    if !monotone {
        notes.push("overlap is not monotone along the theta grid".into());
    }

    Ok(VerificationReport {
        check: "adiabatic".into(),
        statement: "with omega scaled by theta, the ground state converges to the dressed \
                    Hubbard ground state: overlap rises monotonically to at least 0.99, the \
                    energy meets the Hubbard value, the gap stays open, and the total spin \
                    is theta-independent"
            .into(),
        preconditions,
        measured: vec![
            nv("overlap_final", overlap_final),
            nv("e0_final", e0_final),
            nv("e0_hubbard", e0_hubbard),
            nv("limit_energy_gap", limit_gap),
            nv("min_gap", min_gap),
            nv("spin_square_drift", spin_drift),
            nv("gate_e0_first", gate_first),
            nv("gate_e0_last", gate_last),
            nv("gate_overlap", gate_overlap),
        ],
        tolerances: vec![
            nv("overlap_floor", OVERLAP_FLOOR),
            nv("tau_limit_energy", TAU_LIMIT_ENERGY),
            nv("tau_spin_drift", TAU_SPIN_DRIFT),
            nv("tau_theta_gate", TAU_THETA_GATE),
        ],
        trace,
        verdict,
        notes,
    })
}
