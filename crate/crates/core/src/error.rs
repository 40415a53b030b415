//! Shared error type for model validation, basis construction and solvers.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A coupling matrix differs from its transpose. Inputs are rejected,
    /// never symmetrized silently.
    #[error("matrix `{name}` is not symmetric: entry ({i},{j}) = {a}, entry ({j},{i}) = {b}")]
    AsymmetricMatrix {
        name: &'static str,
        i: usize,
        j: usize,
        a: f64,
        b: f64,
    },

    #[error("phonon frequency must be positive, got {0}")]
    NonPositiveOmega(f64),

    /// A nonzero hopping amplitude connects two sites of the same sublattice
    /// (the diagonal counts: t_xx != 0 is site x hopping to itself).
    #[error("hopping t[{x}][{y}] = {value} connects sites of the same sublattice")]
    SameSublatticeHopping { x: usize, y: usize, value: f64 },

    #[error("bond graph is not connected: site {0} is unreachable from site 0")]
    DisconnectedLattice(usize),

    #[error("bond graph contains an odd cycle; no bipartition exists")]
    OddCycle,

    #[error("empty sector: {0}")]
    EmptySector(String),

    #[error("sector mismatch: {0}")]
    SectorMismatch(String),

    #[error("operator is not hermitian (defect {defect:.3e} exceeds {tolerance:.3e})")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:.3e}, target {target:.3e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        target: f64,
    },

    #[error("dimension {dim} exceeds the limit {limit} for {context}")]
    DimensionTooLarge {
        dim: usize,
        limit: usize,
        context: &'static str,
    },

    /// An inverse Fourier sum that must produce a real coupling matrix left an
    /// imaginary residue above tolerance, typically because the momentum
    /// samples were not even under k -> -k.
    #[error("coupling matrix has imaginary residue {residue:.3e} above tolerance {tolerance:.3e}")]
    NonRealResult { residue: f64, tolerance: f64 },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
