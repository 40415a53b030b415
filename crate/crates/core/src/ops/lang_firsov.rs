//! Lang-Firsov displacement generator and the conjugated Hamiltonian.
//!
//! L = (θω)^{-1} Σ_{x,y} g_xy n_x (b†_y - b_y) is real and antisymmetric, so
//! exp(L) is orthogonal and conjugation preserves spectra exactly even at
//! finite phonon cutoff. Two evaluation paths exist: a dense exponential for
//! the operator-level conjugation check, capped at dimension 4000, and a
//! matrix-free series for applying exp(±L) to a single vector, which the
//! adiabatic overlap sweep uses at dimensions the dense path cannot afford.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::SectorBasis;
use crate::model::ModelSpec;

use super::fermion::occupation_diagonal;
use super::hamiltonian::assemble_hh_hamiltonian;
use super::phonon::phonon_annihilator;
use super::sparse::SparseOperator;

pub const DENSE_EXP_LIMIT: usize = 4000;

/// The generator L on a sector basis. Zero coupling yields the zero operator.
pub fn lang_firsov_generator(
    model: &ModelSpec,
    basis: &SectorBasis,
    theta: f64,
) -> Result<SparseOperator> {
    if theta <= 0.0 {
        return Err(Error::PreconditionFailed(format!(
            "adiabatic parameter must be positive, got {theta}"
        )));
    }
    if model.n_sites() != basis.fermions.n_sites {
        return Err(Error::SectorMismatch(format!(
            "model has {} sites but the basis was built on {}",
            model.n_sites(),
            basis.fermions.n_sites
        )));
    }
    let n = model.n_sites();
    let scale = 1.0 / (theta * model.omega);
    let pdim = basis.phonons.len();
    let fdim = basis.fermions.len();
    let mut l = SparseOperator::zeros(fdim * pdim, fdim * pdim);
    for x in 0..n {
        if (0..n).all(|y| model.g[(x, y)] == 0.0) {
            continue;
        }
        // Σ_y g_xy (b†_y - b_y), an antisymmetric phonon-space factor
        let mut p_x = SparseOperator::zeros(pdim, pdim);
        for y in 0..n {
            let gxy = model.g[(x, y)];
            if gxy == 0.0 {
                continue;
            }
            let b = phonon_annihilator(&basis.phonons, y);
            let anti = b.adjoint().add_scaled(&b, Complex64::new(-1.0, 0.0));
            p_x = p_x.add_scaled(&anti, Complex64::new(gxy * scale, 0.0));
        }
        let n_x = SparseOperator::from_real_diagonal(&occupation_diagonal(&basis.fermions, x));
        l = l.add_scaled(&n_x.kron(&p_x), Complex64::new(1.0, 0.0));
    }
    Ok(l)
}

/// exp(L) H_θ exp(-L) with H_θ the Hamiltonian at ω ← θω, evaluated through
/// dense orthogonal conjugation. Exact similarity at any cutoff.
pub fn transformed_hamiltonian(
    model: &ModelSpec,
    basis: &SectorBasis,
    theta: f64,
) -> Result<SparseOperator> {
    let dim = basis.dimension();
    if dim > DENSE_EXP_LIMIT {
        return Err(Error::DimensionTooLarge {
            dim,
            limit: DENSE_EXP_LIMIT,
            context: "dense exponential of the displacement generator",
        });
    }
    let l = lang_firsov_generator(model, basis, theta)?;
    let h_theta = assemble_hh_hamiltonian(&model.with_omega_scaled(theta), basis)?;
    let l_dense = l
        .to_dense_real(1e-12)
        .expect("generator is real in the occupation basis");
    let h_dense = h_theta
        .to_dense_real(1e-12)
        .expect("Hamiltonian is real in the occupation basis");
    let e = l_dense.exp();
    // L is antisymmetric, so exp(L)^{-1} = exp(L)ᵀ
    let conjugated = &e * h_dense * e.transpose();
    let trips: Vec<(usize, usize, Complex64)> = conjugated
        .row_iter()
        .enumerate()
        .flat_map(|(r, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(c, &v)| (r, c, Complex64::new(v, 0.0)))
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(SparseOperator::from_triplets(dim, dim, trips).with_hermitian_checked())
}

/// ψ_f ⊗ Ω: place a fermion-sector vector in the product space with the
/// phonon vacuum, which is phonon index 0 by the graded enumeration.
pub fn embed_with_phonon_vacuum(
    fermion_vec: &DVector<Complex64>,
    phonon_dim: usize,
) -> DVector<Complex64> {
    let fdim = fermion_vec.len();
    let mut out = DVector::from_element(fdim * phonon_dim, Complex64::new(0.0, 0.0));
    for f in 0..fdim {
        out[f * phonon_dim] = fermion_vec[f];
    }
    out
}

/// exp(sign·L) v by scaling and a truncated series. The generator is
/// anti-Hermitian, so the scaled series converges fast and the result keeps
/// the norm of v up to roundoff.
pub fn apply_exp_generator(
    l: &SparseOperator,
    v: &DVector<Complex64>,
    sign: f64,
) -> DVector<Complex64> {
    let norm_est = l.inf_norm();
    let steps = norm_est.ceil().max(1.0) as usize;
    let factor = Complex64::new(sign / steps as f64, 0.0);
    let mut u = v.clone();
    for _ in 0..steps {
        let mut term = u.clone();
        let mut acc = u.clone();
        let base = u.norm();
        for k in 1..=80 {
            term = l.matvec(&term) * (factor / k as f64);
            acc += &term;
            if term.norm() <= 1e-16 * base.max(1e-300) {
                break;
            }
        }
        u = acc;
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{build_sector_basis, SectorKey};
    use crate::model::presets;

    fn sorted_real_eigs(op: &SparseOperator) -> Vec<f64> {
        let dense = op.to_dense_real(1e-11).expect("real operator");
        let mut e: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().cloned().collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    }

    #[test]
    fn zero_coupling_gives_zero_generator() {
        let model = presets::chain(2, -1.0, 4.0, 0.0, 1.0).unwrap();
        let basis = build_sector_basis(
            2,
            SectorKey { n_el: 2, two_m: 0, n_ph_max: 3 },
        )
        .unwrap();
        let l = lang_firsov_generator(&model, &basis, 1.0).unwrap();
        assert_eq!(l.nnz(), 0);
        let h = assemble_hh_hamiltonian(&model, &basis).unwrap();
        let h_prime = transformed_hamiltonian(&model, &basis, 1.0).unwrap();
        let diff = h.add_scaled(&h_prime, Complex64::new(-1.0, 0.0));
        assert!(diff.max_abs() < 1e-12);
    }

    #[test]
    fn generator_is_antihermitian() {
        let model = presets::star(4, -1.0, 2.0, 0.7, 1.3).unwrap();
        let basis = build_sector_basis(
            4,
            SectorKey { n_el: 4, two_m: 0, n_ph_max: 2 },
        )
        .unwrap();
        let l = lang_firsov_generator(&model, &basis, 2.0).unwrap();
        let sum = l.add_scaled(&l.adjoint(), Complex64::new(1.0, 0.0));
        assert!(sum.max_abs() < 1e-13);
    }

    #[test]
    fn conjugation_preserves_the_spectrum() {
        let model = presets::chain(2, -1.0, 4.0, 0.5, 1.0).unwrap();
        let basis = build_sector_basis(
            2,
            SectorKey { n_el: 2, two_m: 0, n_ph_max: 4 },
        )
        .unwrap();
        let h = assemble_hh_hamiltonian(&model.with_omega_scaled(2.0), &basis).unwrap();
        let h_prime = transformed_hamiltonian(&model, &basis, 2.0).unwrap();
        let a = sorted_real_eigs(&h);
        let b = sorted_real_eigs(&h_prime);
        let worst = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "spectra diverge by {worst}");
    }

    #[test]
    fn series_application_matches_dense_exponential() {
        let model = presets::chain(2, -1.0, 4.0, 0.8, 1.0).unwrap();
        let basis = build_sector_basis(
            2,
            SectorKey { n_el: 2, two_m: 0, n_ph_max: 3 },
        )
        .unwrap();
        let l = lang_firsov_generator(&model, &basis, 1.0).unwrap();
        let dense_exp = l.to_dense_real(1e-12).unwrap().exp();
        let dim = basis.dimension();
        let v = DVector::from_fn(dim, |i, _| Complex64::new((i as f64 * 0.37).sin(), 0.0));
        let want = {
            let vr = v.map(|z| z.re);
            (&dense_exp * vr).map(|x| Complex64::new(x, 0.0))
        };
        let got = apply_exp_generator(&l, &v, 1.0);
        assert!((got - want).norm() < 1e-12);
        // exp(-L) inverts exp(L)
        let fwd = apply_exp_generator(&l, &v, 1.0);
        let back = apply_exp_generator(&l, &fwd, -1.0);
        assert!((back - v).norm() < 1e-12);
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let model = presets::star(4, -1.0, 8.0, 0.5, 1.0).unwrap();
        let basis = build_sector_basis(
            4,
            SectorKey { n_el: 4, two_m: 0, n_ph_max: 6 },
        )
        .unwrap();
        assert!(basis.dimension() > DENSE_EXP_LIMIT);
        match transformed_hamiltonian(&model, &basis, 1.0) {
            Err(Error::DimensionTooLarge { dim, limit, .. }) => {
                assert_eq!(dim, basis.dimension());
                assert_eq!(limit, DENSE_EXP_LIMIT);
            }
            other => panic!("expected a dimension error, got {other:?}"),
        }
    }
}
