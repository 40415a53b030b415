//! Sparse operator assembly: Hamiltonians, spin and charge observables, and
//! the Lang-Firsov displacement generator, all in the fixed basis orderings
//! from [`crate::hilbert`].

pub mod fermion;
pub mod hamiltonian;
pub mod heisenberg;
pub mod lang_firsov;
pub mod phonon;
pub mod sparse;
pub mod spin;

pub use sparse::SparseOperator;
