//! Basis enumeration for symmetry sectors.
//!
//! The full space factorizes as (fermion Fock on 2|Λ| modes) ⊗ (phonon Fock
//! truncated by total occupation). Electron number N_el and the spin
//! projection S³ commute with every Hamiltonian assembled here, so bases are
//! enumerated per sector (N_el, 2M) with n_up = (N_el + 2M)/2 spin-up and
//! n_dn = (N_el - 2M)/2 spin-down electrons.
//!
//! Orderings are part of the contract: fermion configurations ascend
//! lexicographically by (up word, down word); phonon configurations are graded
//! by total occupation, then enumerated with the first site's count
//! descending; the combined index is `fermion * n_phonon + phonon`.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Symmetry-sector label plus the phonon truncation it is built at.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct SectorKey {
    pub n_el: usize,
    /// Twice the spin projection, so it stays integral.
    pub two_m: i64,
    /// Largest allowed total phonon occupation Σ_x m_x.
    pub n_ph_max: usize,
}

/// Occupation bit words, site x at bit x.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct FermionConfig {
    pub up: u32,
    pub dn: u32,
}

impl FermionConfig {
    /// Electron count n_x ∈ {0, 1, 2} on site x.
    pub fn n_at(&self, x: usize) -> u32 {
        ((self.up >> x) & 1) + ((self.dn >> x) & 1)
    }
}

/// Phonon occupation vector, one count per site.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct PhononConfig {
    pub occ: Vec<u8>,
}

impl PhononConfig {
    pub fn total(&self) -> usize {
        self.occ.iter().map(|&m| m as usize).sum()
    }
}

/// Global mode order for Jordan-Wigner signs: up modes on sites 0..n first,
/// then down modes, each in site order.
pub fn mode_index(n_sites: usize, site: usize, spin_up: bool) -> usize {
    if spin_up {
        site
    } else {
        n_sites + site
    }
}

/// Combined occupation word over all 2n modes.
pub fn combined_word(n_sites: usize, c: FermionConfig) -> u64 {
    (c.up as u64) | ((c.dn as u64) << n_sites)
}

/// Parity (+1/-1) of the number of occupied modes strictly below `mode`.
pub fn jw_sign(word: u64, mode: usize) -> f64 {
    let below = word & ((1u64 << mode) - 1);
    if below.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All n-bit words with exactly k bits set, ascending as integers
/// (lexicographic smallest-site-first reading).
fn words_with_popcount(n_bits: usize, k: usize) -> Vec<u32> {
    assert!(n_bits <= 31);
    if k > n_bits {
        return vec![];
    }
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::with_capacity(binomial(n_bits, k) as usize);
    let limit = 1u32 << n_bits;
    let mut w = (1u32 << k) - 1;
    while w < limit {
        out.push(w);
        // Gosper's hack: next larger word with the same popcount.
        let c = w & w.wrapping_neg();
        let r = w + c;
        w = (((r ^ w) >> 2) / c) | r;
    }
    out
}

#[derive(Clone, Debug)]
pub struct FermionBasis {
    pub n_sites: usize,
    pub n_up: usize,
    pub n_dn: usize,
    pub states: Vec<FermionConfig>,
    index: HashMap<FermionConfig, usize>,
}

impl FermionBasis {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, c: FermionConfig) -> Option<usize> {
        self.index.get(&c).copied()
    }
}

/// Enumerate the fermion sector with `n_el` electrons and S³ = two_m/2.
///
/// Errors with [`Error::EmptySector`] when no occupation satisfies the labels
/// (odd n_el + two_m, or a spin count outside 0..=n_sites).
pub fn enumerate_fermion_sector(n_sites: usize, n_el: usize, two_m: i64) -> Result<FermionBasis> {
    let nu2 = n_el as i64 + two_m;
    let nd2 = n_el as i64 - two_m;
    if nu2 < 0 || nd2 < 0 || nu2 % 2 != 0 || nu2 / 2 > n_sites as i64 || nd2 / 2 > n_sites as i64 {
        return Err(Error::EmptySector(format!(
            "no configuration has n_el = {n_el}, 2M = {two_m} on {n_sites} sites"
        )));
    }
    let n_up = (nu2 / 2) as usize;
    let n_dn = (nd2 / 2) as usize;
    let ups = words_with_popcount(n_sites, n_up);
    let dns = words_with_popcount(n_sites, n_dn);
    let mut states = Vec::with_capacity(ups.len() * dns.len());
    for &up in &ups {
        for &dn in &dns {
            states.push(FermionConfig { up, dn });
        }
    }
    let index = states.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    debug_assert_eq!(
        states.len() as u128,
        binomial(n_sites, n_up) * binomial(n_sites, n_dn)
    );
    Ok(FermionBasis {
        n_sites,
        n_up,
        n_dn,
        states,
        index,
    })
}

#[derive(Clone, Debug)]
pub struct PhononBasis {
    pub n_sites: usize,
    pub n_ph_max: usize,
    pub states: Vec<PhononConfig>,
    index: HashMap<Vec<u8>, usize>,
}

impl PhononBasis {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        self.index.get(occ).copied()
    }
}

fn compositions_into(n_parts: usize, total: usize, prefix: &mut Vec<u8>, out: &mut Vec<PhononConfig>) {
    if n_parts == 1 {
        prefix.push(total as u8);
        out.push(PhononConfig { occ: prefix.clone() });
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first as u8);
        compositions_into(n_parts - 1, total - first, prefix, out);
        prefix.pop();
    }
}

/// Enumerate phonon occupations with Σ m_x ≤ n_ph_max, graded by the total.
/// On two sites with cutoff 1 the order is (0,0), (1,0), (0,1).
pub fn enumerate_phonon_states(n_sites: usize, n_ph_max: usize) -> PhononBasis {
    assert!(n_sites >= 1);
    assert!(n_ph_max <= u8::MAX as usize);
    let mut states = Vec::with_capacity(binomial(n_ph_max + n_sites, n_sites) as usize);
    for total in 0..=n_ph_max {
        compositions_into(n_sites, total, &mut Vec::with_capacity(n_sites), &mut states);
    }
    debug_assert_eq!(
        states.len() as u128,
        binomial(n_ph_max + n_sites, n_sites)
    );
    let index = states
        .iter()
        .enumerate()
        .map(|(i, c)| (c.occ.clone(), i))
        .collect();
    PhononBasis {
        n_sites,
        n_ph_max,
        states,
        index,
    }
}

/// Combined electron-phonon basis of one sector.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    pub key: SectorKey,
    pub fermions: FermionBasis,
    pub phonons: PhononBasis,
}

impl SectorBasis {
    pub fn dimension(&self) -> usize {
        self.fermions.len() * self.phonons.len()
    }

    /// Combined index: fermion major, phonon minor.
    pub fn index(&self, f_idx: usize, p_idx: usize) -> usize {
        f_idx * self.phonons.len() + p_idx
    }

    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.phonons.len(), idx % self.phonons.len())
    }

    pub fn state(&self, idx: usize) -> (&FermionConfig, &PhononConfig) {
        let (f, p) = self.split(idx);
        (&self.fermions.states[f], &self.phonons.states[p])
    }
}

pub fn build_sector_basis(n_sites: usize, key: SectorKey) -> Result<SectorBasis> {
    let fermions = enumerate_fermion_sector(n_sites, key.n_el, key.two_m)?;
    let phonons = enumerate_phonon_states(n_sites, key.n_ph_max);
    Ok(SectorBasis {
        key,
        fermions,
        phonons,
    })
}
