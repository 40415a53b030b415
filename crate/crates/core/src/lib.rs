//! Exact diagonalization for electron-phonon lattice models on small
//! bipartite clusters, plus a harness that turns ground-state structure
//! claims (uniqueness, total spin, correlation signs, susceptibility bounds,
//! adiabatic and strong-coupling limits) into measured pass/fail checks.
//!
//! Layering, bottom up: [`model`] validates couplings and lattice geometry,
//! [`hilbert`] enumerates symmetry-sector bases, [`ops`] assembles sparse
//! operators, [`solve`] computes spectra and resolvents, [`verify`] runs the
//! checks and emits structured reports.

pub mod error;
pub mod hilbert;
pub mod model;
pub mod ops;
pub mod solve;
pub mod verify;

pub use error::{Error, Result};
