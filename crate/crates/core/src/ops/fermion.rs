//! Sector-resolved fermion operators with Jordan-Wigner signs.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{combined_word, jw_sign, mode_index, FermionBasis, FermionConfig};

use super::sparse::SparseOperator;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Spin {
    Up,
    Dn,
}

impl Spin {
    pub fn is_up(self) -> bool {
        matches!(self, Spin::Up)
    }
}

/// The annihilator c_{x,σ} as a map between sectors. `from` must hold one
/// more σ-electron than `to`, with the other spin count unchanged.
pub fn annihilator(
    from: &FermionBasis,
    to: &FermionBasis,
    site: usize,
    spin: Spin,
) -> Result<SparseOperator> {
    let n = from.n_sites;
    if to.n_sites != n || site >= n {
        return Err(Error::SectorMismatch(format!(
            "annihilator on site {site} needs matching bases on {n} sites"
        )));
    }
    let counts_ok = match spin {
        Spin::Up => to.n_up + 1 == from.n_up && to.n_dn == from.n_dn,
        Spin::Dn => to.n_dn + 1 == from.n_dn && to.n_up == from.n_up,
    };
    if !counts_ok {
        return Err(Error::SectorMismatch(format!(
            "annihilator needs (n_up, n_dn) to drop from ({}, {}) by one {} electron, got ({}, {})",
            from.n_up,
            from.n_dn,
            if spin.is_up() { "up" } else { "down" },
            to.n_up,
            to.n_dn
        )));
    }
    let bit = 1u32 << site;
    let mode = mode_index(n, site, spin.is_up());
    let mut trips = Vec::new();
    for (col, &c) in from.states.iter().enumerate() {
        let occupied = match spin {
            Spin::Up => c.up & bit != 0,
            Spin::Dn => c.dn & bit != 0,
        };
        if !occupied {
            continue;
        }
        let image = match spin {
            Spin::Up => FermionConfig { up: c.up ^ bit, dn: c.dn },
            Spin::Dn => FermionConfig { up: c.up, dn: c.dn ^ bit },
        };
        let row = to
            .index_of(image)
            .expect("image configuration lies in the target sector");
        let sign = jw_sign(combined_word(n, c), mode);
        trips.push((row, col, Complex64::new(sign, 0.0)));
    }
    Ok(SparseOperator::from_triplets(to.len(), from.len(), trips))
}

/// Diagonal of the site occupation n_x = n_{x↑} + n_{x↓} over a sector basis.
pub fn occupation_diagonal(basis: &FermionBasis, site: usize) -> Vec<f64> {
    basis
        .states
        .iter()
        .map(|c| c.n_at(site) as f64)
        .collect()
}

/// Kinetic term Σ_{x,y,σ} t_xy c†_{xσ} c_{yσ} within one sector.
///
/// Assembled directly on occupation words: moving an electron from y to x
/// picks up the product of the two crossing parities, evaluated by removing
/// at y first.
pub fn hopping_operator(basis: &FermionBasis, t: &nalgebra::DMatrix<f64>) -> SparseOperator {
    let n = basis.n_sites;
    assert_eq!(t.nrows(), n);
    let mut trips = Vec::new();
    for (col, &c) in basis.states.iter().enumerate() {
        for y in 0..n {
            for x in 0..n {
                let txy = t[(x, y)];
                if txy == 0.0 || x == y {
                    continue;
                }
                for spin in [Spin::Up, Spin::Dn] {
                    let word = match spin {
                        Spin::Up => c.up,
                        Spin::Dn => c.dn,
                    };
                    let (by, bx) = (1u32 << y, 1u32 << x);
                    if word & by == 0 || word & bx != 0 {
                        continue;
                    }
                    let mid = match spin {
                        Spin::Up => FermionConfig { up: c.up ^ by, dn: c.dn },
                        Spin::Dn => FermionConfig { up: c.up, dn: c.dn ^ by },
                    };
                    let sign_y = jw_sign(combined_word(n, c), mode_index(n, y, spin.is_up()));
                    let sign_x = jw_sign(combined_word(n, mid), mode_index(n, x, spin.is_up()));
                    let dest = match spin {
                        Spin::Up => FermionConfig { up: mid.up | bx, dn: mid.dn },
                        Spin::Dn => FermionConfig { up: mid.up, dn: mid.dn | bx },
                    };
                    let row = basis
                        .index_of(dest)
                        .expect("hopping preserves both spin counts");
                    trips.push((row, col, Complex64::new(txy * sign_y * sign_x, 0.0)));
                }
            }
        }
    }
    SparseOperator::from_triplets(basis.len(), basis.len(), trips).with_hermitian_checked()
}
