//! Spin and charge operators on sector bases.
//!
//! S⁺_x = c†_{x↑} c_{x↓} moves one electron from the down to the up band, so
//! it maps the sector (n_el, 2M) to (n_el, 2M+2). All spin maps here come in
//! fermion-space form plus a lift to the electron-phonon product space, where
//! they act as (op ⊗ identity). Because they commute with the phonon number,
//! spin symmetry is exact at any cutoff.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{
    combined_word, enumerate_fermion_sector, jw_sign, mode_index, FermionBasis, FermionConfig,
    SectorBasis,
};
use crate::model::{FourierInfo, ModelSpec, Sublattice};

use super::sparse::SparseOperator;

/// Σ_x w_x S⁺_x between fermion sectors; `to` holds one more up and one fewer
/// down electron.
pub fn weighted_spin_raiser(
    from: &FermionBasis,
    to: &FermionBasis,
    weights: &[Complex64],
) -> Result<SparseOperator> {
    let n = from.n_sites;
    if to.n_sites != n || weights.len() != n {
        return Err(Error::SectorMismatch(format!(
            "spin raiser needs {n}-site bases and one weight per site"
        )));
    }
    if to.n_up != from.n_up + 1 || to.n_dn + 1 != from.n_dn {
        return Err(Error::SectorMismatch(format!(
            "spin raiser maps (n_up, n_dn) = ({}, {}) to ({}, {}), got target ({}, {})",
            from.n_up,
            from.n_dn,
            from.n_up + 1,
            from.n_dn - 1,
            to.n_up,
            to.n_dn
        )));
    }
    let mut trips = Vec::new();
    for (col, &c) in from.states.iter().enumerate() {
        for x in 0..n {
            if weights[x] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let bit = 1u32 << x;
            if c.dn & bit == 0 || c.up & bit != 0 {
                continue;
            }
            let mid = FermionConfig { up: c.up, dn: c.dn ^ bit };
            let sign_dn = jw_sign(combined_word(n, c), mode_index(n, x, false));
            let sign_up = jw_sign(combined_word(n, mid), mode_index(n, x, true));
            let dest = FermionConfig { up: mid.up | bit, dn: mid.dn };
            let row = to
                .index_of(dest)
                .expect("raised configuration lies in the target sector");
            trips.push((row, col, weights[x] * (sign_dn * sign_up)));
        }
    }
    Ok(SparseOperator::from_triplets(to.len(), from.len(), trips))
}

/// op ⊗ identity on a phonon factor of the given dimension.
pub fn lift_fermion_op(op: &SparseOperator, phonon_dim: usize) -> SparseOperator {
    op.kron(&SparseOperator::identity(phonon_dim))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RaiserKind {
    /// Ŝ⁺_0 = |Λ|^{-1/2} Σ_x S⁺_x.
    Uniform,
    /// Ŝ⁺_Q = |Λ|^{-1/2} Σ_x γ(x) S⁺_x with γ = +1 on A, -1 on B.
    Staggered,
}

/// Normalized uniform or staggered spin raiser on the product space,
/// mapping the sector of `from` to that of `to` (2M increased by 2).
pub fn staggered_spin_raiser(
    model: &ModelSpec,
    from: &SectorBasis,
    to: &SectorBasis,
    kind: RaiserKind,
) -> Result<SparseOperator> {
    if from.phonons.len() != to.phonons.len() || from.key.n_ph_max != to.key.n_ph_max {
        return Err(Error::SectorMismatch(
            "spin raiser endpoints must share the phonon truncation".into(),
        ));
    }
    let n = model.n_sites();
    let norm = 1.0 / (n as f64).sqrt();
    let weights: Vec<Complex64> = (0..n)
        .map(|x| {
            let gamma = match kind {
                RaiserKind::Uniform => 1.0,
                RaiserKind::Staggered => match model.sublattice[x] {
                    Sublattice::A => 1.0,
                    Sublattice::B => -1.0,
                },
            };
            Complex64::new(norm * gamma, 0.0)
        })
        .collect();
    let f = weighted_spin_raiser(&from.fermions, &to.fermions, &weights)?;
    Ok(lift_fermion_op(&f, from.phonons.len()))
}

/// S⁻_x on the product space (adjoint of the unit-weight single-site raiser).
pub fn site_spin_lowering(from: &SectorBasis, to: &SectorBasis, site: usize) -> Result<SparseOperator> {
    if from.phonons.len() != to.phonons.len() {
        return Err(Error::SectorMismatch(
            "spin lowering endpoints must share the phonon truncation".into(),
        ));
    }
    let n = from.fermions.n_sites;
    let mut weights = vec![Complex64::new(0.0, 0.0); n];
    weights[site] = Complex64::new(1.0, 0.0);
    // S⁻_x: M → M-1 is the adjoint of S⁺_x: M-1 → M
    let raiser = weighted_spin_raiser(&to.fermions, &from.fermions, &weights)?;
    Ok(lift_fermion_op(&raiser.adjoint(), from.phonons.len()))
}

/// S_tot² restricted to one fermion sector:
/// M² + ½(S⁺S⁻ + S⁻S⁺) with S± assembled toward the adjacent sectors.
/// A missing adjacent sector contributes zero.
pub fn total_spin_square_fermion(basis: &FermionBasis) -> SparseOperator {
    let n = basis.n_sites;
    let n_el = basis.n_up + basis.n_dn;
    let two_m = basis.n_up as i64 - basis.n_dn as i64;
    let ones = vec![Complex64::new(1.0, 0.0); n];
    let m = two_m as f64 / 2.0;
    let mut s2 = SparseOperator::identity(basis.len()).scaled(Complex64::new(m * m, 0.0));
    // ½ S⁺S⁻ through the sector below
    if let Ok(below) = enumerate_fermion_sector(n, n_el, two_m - 2) {
        let up_from_below = weighted_spin_raiser(&below, basis, &ones)
            .expect("adjacent sector shapes match");
        let lower = up_from_below.adjoint();
        s2 = s2.add_scaled(&up_from_below.matmul(&lower), Complex64::new(0.5, 0.0));
    }
    // ½ S⁻S⁺ through the sector above
    if let Ok(above) = enumerate_fermion_sector(n, n_el, two_m + 2) {
        let raise = weighted_spin_raiser(basis, &above, &ones)
            .expect("adjacent sector shapes match");
        s2 = s2.add_scaled(&raise.adjoint().matmul(&raise), Complex64::new(0.5, 0.0));
    }
    let mut s2 = s2;
    s2.hermitian = true;
    s2
}

/// S_tot² on the electron-phonon product space of a sector.
pub fn total_spin_square(basis: &SectorBasis) -> SparseOperator {
    lift_fermion_op(&total_spin_square_fermion(&basis.fermions), basis.phonons.len())
}

/// ⟨ψ| S_tot² |ψ⟩ for a normalized product-space vector.
pub fn spin_square_expectation(basis: &SectorBasis, psi: &DVector<Complex64>) -> f64 {
    let s2 = total_spin_square(basis);
    psi.dotc(&s2.matvec(psi)).re
}

/// Charge deviation q_x = n_x - 1 as a diagonal on the product space.
pub fn charge_site(basis: &SectorBasis, site: usize) -> SparseOperator {
    let pdim = basis.phonons.len();
    let diag: Vec<f64> = basis
        .fermions
        .states
        .iter()
        .map(|c| c.n_at(site) as f64 - 1.0)
        .collect();
    lift_fermion_op(&SparseOperator::from_real_diagonal(&diag), pdim)
}

/// q̂_k = |Λ|^{-1/2} Σ_x e^{-i k·x} (n_x - 1), diagonal with complex weights;
/// its adjoint is q̂_{-k}. `k_index` addresses the Fourier mesh.
pub fn charge_fourier(
    basis: &SectorBasis,
    fourier: &FourierInfo,
    k_index: usize,
) -> SparseOperator {
    let n = fourier.positions.len();
    assert_eq!(basis.fermions.n_sites, n);
    let norm = 1.0 / (n as f64).sqrt();
    let phases: Vec<Complex64> = (0..n)
        .map(|x| {
            let phi = -fourier.k_dot_x(k_index, x);
            Complex64::new(0.0, phi).exp() * norm
        })
        .collect();
    let pdim = basis.phonons.len();
    let trips: Vec<(usize, usize, Complex64)> = basis
        .fermions
        .states
        .iter()
        .enumerate()
        .filter_map(|(i, c)| {
            let w: Complex64 = (0..n)
                .map(|x| phases[x] * (c.n_at(x) as f64 - 1.0))
                .sum();
            (w != Complex64::new(0.0, 0.0)).then_some((i, i, w))
        })
        .collect();
    lift_fermion_op(
        &SparseOperator::from_triplets(basis.fermions.len(), basis.fermions.len(), trips),
        pdim,
    )
}
