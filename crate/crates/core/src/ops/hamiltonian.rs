//! Hamiltonian assembly on sector bases.
//!
//! The electron-phonon Hamiltonian acts on a fermion-sector ⊗ phonon product
//! space:
//!
//!   H = Σ t_xy c†_xσ c_yσ  +  ½ Σ U_xy (n_x - 1)(n_y - 1)
//!     + Σ g_xy n_x (b_y + b†_y)  +  ω Σ b†_x b_x.
//!
//! Every term is real in the occupation basis; entries are stored as complex
//! only to share the sparse type with sector-changing maps.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{FermionBasis, SectorBasis};
use crate::model::ModelSpec;

use super::fermion::{hopping_operator, occupation_diagonal};
use super::phonon::{displacement, total_number_diagonal};
use super::sparse::SparseOperator;

fn check_sites(model: &ModelSpec, n_sites: usize) -> Result<()> {
    if model.n_sites() != n_sites {
        return Err(Error::SectorMismatch(format!(
            "model has {} sites but the basis was built on {}",
            model.n_sites(),
            n_sites
        )));
    }
    Ok(())
}

/// Interaction diagonal ½ Σ_xy U_xy (n_x - 1)(n_y - 1) per fermion state.
fn interaction_diagonal(basis: &FermionBasis, u: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    let n = basis.n_sites;
    basis
        .states
        .iter()
        .map(|c| {
            let dev: Vec<f64> = (0..n).map(|x| c.n_at(x) as f64 - 1.0).collect();
            let mut acc = 0.0;
            for x in 0..n {
                if dev[x] == 0.0 {
                    continue;
                }
                for y in 0..n {
                    acc += u[(x, y)] * dev[x] * dev[y];
                }
            }
            0.5 * acc
        })
        .collect()
}

/// Full electron-phonon Hamiltonian on one sector.
pub fn assemble_hh_hamiltonian(model: &ModelSpec, basis: &SectorBasis) -> Result<SparseOperator> {
    check_sites(model, basis.fermions.n_sites)?;
    let n = model.n_sites();
    let fdim = basis.fermions.len();
    let pdim = basis.phonons.len();

    let id_p = SparseOperator::identity(pdim);
    let id_f = SparseOperator::identity(fdim);

    let electronic = hopping_operator(&basis.fermions, &model.t).add_scaled(
        &SparseOperator::from_real_diagonal(&interaction_diagonal(&basis.fermions, &model.u)),
        Complex64::new(1.0, 0.0),
    );
    let mut h = electronic.kron(&id_p);

    let phonon_energy: Vec<f64> = total_number_diagonal(&basis.phonons)
        .iter()
        .map(|v| model.omega * v)
        .collect();
    h = h.add_scaled(
        &id_f.kron(&SparseOperator::from_real_diagonal(&phonon_energy)),
        Complex64::new(1.0, 0.0),
    );

    // coupling: for each electron site x, the phonon operator Σ_y g_xy q_y
    for x in 0..n {
        if (0..n).all(|y| model.g[(x, y)] == 0.0) {
            continue;
        }
        let mut q_x = SparseOperator::zeros(pdim, pdim);
        for y in 0..n {
            let gxy = model.g[(x, y)];
            if gxy != 0.0 {
                q_x = q_x.add_scaled(&displacement(&basis.phonons, y), Complex64::new(gxy, 0.0));
            }
        }
        let n_x = SparseOperator::from_real_diagonal(&occupation_diagonal(&basis.fermions, x));
        h = h.add_scaled(&n_x.kron(&q_x), Complex64::new(1.0, 0.0));
    }

    let h = h.with_hermitian_checked();
    h.require_hermitian()?;
    Ok(h)
}

/// Purely electronic Hamiltonian (no phonon sector): hopping plus the same
/// quadratic interaction, with an arbitrary real symmetric U matrix.
pub fn assemble_electronic(
    t: &nalgebra::DMatrix<f64>,
    u: &nalgebra::DMatrix<f64>,
    basis: &FermionBasis,
) -> Result<SparseOperator> {
    if t.nrows() != basis.n_sites || u.nrows() != basis.n_sites {
        return Err(Error::SectorMismatch(format!(
            "coefficient matrices are {}x{} but the basis has {} sites",
            t.nrows(),
            t.ncols(),
            basis.n_sites
        )));
    }
    let h = hopping_operator(basis, t)
        .add_scaled(
            &SparseOperator::from_real_diagonal(&interaction_diagonal(basis, u)),
            Complex64::new(1.0, 0.0),
        )
        .with_hermitian_checked();
    h.require_hermitian()?;
    Ok(h)
}
