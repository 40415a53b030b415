//! The check harness. Each function measures one structural claim about the
//! half-filled ground state and returns a [`VerificationReport`] with the
//! verdict, the numbers behind it, and the convergence trace it rests on.
//!
//! Checks refuse (with [`crate::Error::PreconditionFailed`]) outside the
//! hypotheses they cover, and report `Inconclusive` rather than `Fail` when
//! the measured quantities have not settled on the supplied grids.

pub mod adiabatic;
pub mod charge;
pub mod conditions;
pub mod heisenberg;
pub mod report;
pub mod spin;

pub use adiabatic::verify_adiabatic_limit;
pub use charge::charge_susceptibility;
pub use conditions::check_conditions;
pub use heisenberg::verify_heisenberg_limit;
pub use report::{NamedValue, PreconditionRecord, TraceRow, Verdict, VerificationReport};
pub use spin::{
    verify_lro_inequality, verify_sector_uniqueness, verify_sign_pattern, verify_total_spin,
};
