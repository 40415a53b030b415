//! Eigensolvers and derived linear-algebra routines: dense and Lanczos
//! ground-state extraction, the deflated resolvent, and parameter sweeps.

pub mod resolvent;
pub mod spectrum;
pub mod sweep;

pub use resolvent::deflated_resolvent_apply;
pub use spectrum::{ground_spectrum, ground_spectrum_opts, SolveOptions, SolverKind, SpectrumResult};
pub use sweep::{cutoff_sweep, theta_sweep, SweepResult, SweepRow};
