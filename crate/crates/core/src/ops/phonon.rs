//! Boson ladder operators on the truncated phonon space.
//!
//! Lowering never leaves the truncated space, so b_x is exact. Raising is
//! clipped on the top grade Σ m = n_ph_max: there [b_x, b†_x] ≠ 1, which is
//! the only place the cutoff enters. Convergence sweeps quantify the effect.

use num_complex::Complex64;

use crate::hilbert::PhononBasis;

use super::sparse::SparseOperator;

/// b_x on the truncated space.
pub fn phonon_annihilator(basis: &PhononBasis, site: usize) -> SparseOperator {
    assert!(site < basis.n_sites);
    let mut trips = Vec::new();
    for (col, state) in basis.states.iter().enumerate() {
        let m = state.occ[site];
        if m == 0 {
            continue;
        }
        let mut image = state.occ.clone();
        image[site] = m - 1;
        let row = basis
            .index_of(&image)
            .expect("lowering stays within the truncation");
        trips.push((row, col, Complex64::new((m as f64).sqrt(), 0.0)));
    }
    SparseOperator::from_triplets(basis.len(), basis.len(), trips)
}

/// Position-like coupling operator b_x + b†_x.
pub fn displacement(basis: &PhononBasis, site: usize) -> SparseOperator {
    let b = phonon_annihilator(basis, site);
    let bdag = b.adjoint();
    b.add_scaled(&bdag, Complex64::new(1.0, 0.0)).with_hermitian_checked()
}

/// Diagonal of the total phonon number Σ_x b†_x b_x.
pub fn total_number_diagonal(basis: &PhononBasis) -> Vec<f64> {
    basis.states.iter().map(|s| s.total() as f64).collect()
}
