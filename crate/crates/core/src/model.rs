//! Model definition and static coupling checks.
//!
//! A model on a finite site set Λ is fixed by four couplings:
//!
//! ```text
//! H = Σ_{x,y,σ} t_xy c†_xσ c_yσ
//!   + Σ_{x,y} (U_xy/2) (n_x - 1)(n_y - 1)
//!   + Σ_{x,y} g_xy n_x (b†_y + b_y)
//!   + ω Σ_x b†_x b_x
//! ```
//!
//! with t, U, g real symmetric |Λ|×|Λ| matrices and ω > 0. Three structural
//! conditions make the ground-state checks in [`crate::verify`] meaningful:
//!
//! * the bond graph (edges where t_xy ≠ 0) is connected,
//! * the bond graph is bipartite, with every bond crossing the A/B cut,
//! * every column sum Σ_x g_xy is the same constant.
//!
//! The first two are enforced by [`build_model`]; the third is reported by
//! [`check_phonon_sum_rule`] and gated on by the verification harness, since a
//! model that violates it is still a valid Hamiltonian.
//!
//! Integrating out the phonons at frequency ω screens the electron repulsion
//! down to the effective matrix produced by [`effective_interaction`]:
//!
//! ```text
//! U_eff = U - (2/ω) g gᵀ
//! ```
//!
//! Its definiteness class decides which ground-state statements apply.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Exact tolerance on the electron-phonon column-sum constancy.
pub const TAU_SUM: f64 = 1e-12;
/// Imaginary residue allowed when inverse Fourier sums produce couplings.
pub const TAU_FFT: f64 = 1e-10;
/// Relative eigenvalue tolerance separating definite from semidefinite.
pub const TAU_DEF: f64 = 1e-10;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Sublattice {
    A,
    B,
}

impl Sublattice {
    /// Staggering sign γ(x): +1 on A, -1 on B.
    pub fn sign(self) -> f64 {
        match self {
            Sublattice::A => 1.0,
            Sublattice::B => -1.0,
        }
    }
}

/// Momentum-space metadata kept by translation-invariant builds.
///
/// Sites and mesh points are indexed by integer vectors n, ℓ with components
/// in {-L+1, ..., L}, enumerated lexicographically; there are (2L)^d of each.
/// The phase pairing a mesh point with a site is
///
/// ```text
/// k·x = (2π / 2L) Σ_j ℓ_j n_j
/// ```
///
/// so primitive lattice vectors never enter explicitly.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierInfo {
    pub dim: usize,
    pub l_size: usize,
    /// Mesh index vectors ℓ, one per momentum.
    pub mesh: Vec<Vec<i64>>,
    /// Position index vectors n, one per site, same enumeration order.
    pub positions: Vec<Vec<i64>>,
    /// Samples G(k) of the electron-phonon coupling on the mesh.
    pub g_k: Vec<f64>,
    /// Samples U(k) of the electron repulsion on the mesh.
    pub u_k: Vec<f64>,
}

impl FourierInfo {
    pub fn n_points(&self) -> usize {
        self.mesh.len()
    }

    /// k·x for mesh point `ki` and site `xi`, in radians.
    pub fn k_dot_x(&self, ki: usize, xi: usize) -> f64 {
        let period = 2.0 * self.l_size as f64;
        let prod: i64 = self.mesh[ki]
            .iter()
            .zip(&self.positions[xi])
            .map(|(l, n)| l * n)
            .sum();
        2.0 * std::f64::consts::PI * prod as f64 / period
    }

    /// Screened interaction U_eff(k) = U(k) - (2/ω) G(k)² per mesh point.
    pub fn u_eff_k(&self, omega: f64) -> Vec<f64> {
        self.g_k
            .iter()
            .zip(&self.u_k)
            .map(|(g, u)| u - 2.0 / omega * g * g)
            .collect()
    }

    /// Cartesian momentum components of mesh point `ki` in units where the
    /// lattice constant is 1 (so each component lies in (-π, π]).
    pub fn momentum(&self, ki: usize) -> Vec<f64> {
        let period = 2.0 * self.l_size as f64;
        self.mesh[ki]
            .iter()
            .map(|l| 2.0 * std::f64::consts::PI * *l as f64 / period)
            .collect()
    }

    fn index_of_mesh(&self, l: &[i64]) -> usize {
        self.mesh
            .iter()
            .position(|m| m == l)
            .expect("wrapped vector lies on the mesh")
    }

    /// Index of the zero momentum point ℓ = 0.
    pub fn zero_index(&self) -> usize {
        self.index_of_mesh(&vec![0; self.dim])
    }

    /// Index of -k: components are negated and wrapped mod 2L back into
    /// {-L+1, ..., L} (only ℓ = L is its own negative under the wrap).
    pub fn negated_index(&self, ki: usize) -> usize {
        let l_max = self.l_size as i64;
        let wrapped: Vec<i64> = self.mesh[ki]
            .iter()
            .map(|&l| if -l < -l_max + 1 { l_max } else { -l })
            .collect();
        self.index_of_mesh(&wrapped)
    }
}

/// A validated model: symmetric couplings on a connected bipartite bond graph.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    /// Site labels, for reports only; indices are what the code works with.
    pub sites: Vec<String>,
    pub sublattice: Vec<Sublattice>,
    pub t: DMatrix<f64>,
    pub u: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub omega: f64,
    /// Present when the couplings came from momentum samples (or a preset
    /// that is translation invariant); required by charge-sector checks.
    pub fourier: Option<FourierInfo>,
}

impl ModelSpec {
    pub fn n_sites(&self) -> usize {
        self.t.nrows()
    }

    /// (|A|, |B|).
    pub fn sublattice_counts(&self) -> (usize, usize) {
        let a = self.sublattice.iter().filter(|s| **s == Sublattice::A).count();
        (a, self.sublattice.len() - a)
    }

    /// Twice the ground-state total spin predicted for the half-filled model,
    /// 2S = ||A| - |B||.
    pub fn two_s_expected(&self) -> usize {
        let (a, b) = self.sublattice_counts();
        a.abs_diff(b)
    }

    pub fn u_eff(&self) -> DMatrix<f64> {
        effective_interaction(&self.u, &self.g, self.omega)
    }

    /// Replace ω by θω, leaving every other coupling alone.
    pub fn with_omega_scaled(&self, theta: f64) -> ModelSpec {
        let mut m = self.clone();
        m.omega *= theta;
        m
    }

    /// Same lattice and hopping, with U replaced by u0·I and g zeroed: the
    /// plain Hubbard reference point.
    pub fn hubbard_at(&self, u0: f64) -> ModelSpec {
        let n = self.n_sites();
        let mut m = self.clone();
        m.u = DMatrix::from_diagonal_element(n, n, u0);
        m.g = DMatrix::zeros(n, n);
        m
    }
}

fn require_symmetric(m: &DMatrix<f64>, name: &'static str) -> Result<()> {
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            if m[(i, j)] != m[(j, i)] {
                return Err(Error::AsymmetricMatrix {
                    name,
                    i,
                    j,
                    a: m[(i, j)],
                    b: m[(j, i)],
                });
            }
        }
    }
    Ok(())
}

/// Two-color the bond graph of `t`, or validate a proposed coloring.
///
/// Bonds are the exact nonzero entries of `t`. BFS assigns `A` to the first
/// site seen in each component, so the labeling is deterministic. A proposed
/// map is checked bond by bond and returned unchanged. With
/// `require_connected`, an unreachable site is an error.
pub fn check_bipartition(
    t: &DMatrix<f64>,
    proposed: Option<&[Sublattice]>,
    require_connected: bool,
) -> Result<Vec<Sublattice>> {
    let n = t.nrows();
    // Self-loops can never cross the cut.
    for x in 0..n {
        if t[(x, x)] != 0.0 {
            return Err(Error::SameSublatticeHopping {
                x,
                y: x,
                value: t[(x, x)],
            });
        }
    }
    if let Some(map) = proposed {
        for x in 0..n {
            for y in (x + 1)..n {
                if t[(x, y)] != 0.0 && map[x] == map[y] {
                    return Err(Error::SameSublatticeHopping {
                        x,
                        y,
                        value: t[(x, y)],
                    });
                }
            }
        }
        if require_connected {
            check_connected(t)?;
        }
        return Ok(map.to_vec());
    }

    let mut color: Vec<Option<Sublattice>> = vec![None; n];
    for start in 0..n {
        if color[start].is_some() {
            continue;
        }
        if start > 0 && require_connected {
            return Err(Error::DisconnectedLattice(start));
        }
        color[start] = Some(Sublattice::A);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            let cx = color[x].unwrap();
            let flip = match cx {
                Sublattice::A => Sublattice::B,
                Sublattice::B => Sublattice::A,
            };
            for y in 0..n {
                if t[(x, y)] == 0.0 || y == x {
                    continue;
                }
                match color[y] {
                    None => {
                        color[y] = Some(flip);
                        queue.push_back(y);
                    }
                    Some(cy) if cy == cx => return Err(Error::OddCycle),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(color.into_iter().map(|c| c.unwrap()).collect())
}

fn check_connected(t: &DMatrix<f64>) -> Result<()> {
    let n = t.nrows();
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for y in 0..n {
            if !seen[y] && t[(x, y)] != 0.0 {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    match seen.iter().position(|s| !s) {
        Some(site) => Err(Error::DisconnectedLattice(site)),
        None => Ok(()),
    }
}

/// Validate couplings and assemble a [`ModelSpec`].
///
/// Rejects non-square or asymmetric matrices, ω ≤ 0, hopping inside one
/// sublattice, odd cycles and disconnected bond graphs. `sites` defaults to
/// "1".."n". The electron-phonon sum rule is deliberately not enforced here;
/// see [`check_phonon_sum_rule`].
pub fn build_model(
    t: DMatrix<f64>,
    u: DMatrix<f64>,
    g: DMatrix<f64>,
    omega: f64,
    sites: Option<Vec<String>>,
    sublattice: Option<Vec<Sublattice>>,
) -> Result<ModelSpec> {
    let n = t.nrows();
    for (m, name) in [(&t, "t"), (&u, "U"), (&g, "g")] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::SectorMismatch(format!(
                "coupling `{name}` is {}x{}, expected {n}x{n}",
                m.nrows(),
                m.ncols()
            )));
        }
    }
    require_symmetric(&t, "t")?;
    require_symmetric(&u, "U")?;
    require_symmetric(&g, "g")?;
    if !(omega > 0.0) {
        return Err(Error::NonPositiveOmega(omega));
    }
    if let Some(map) = &sublattice {
        if map.len() != n {
            return Err(Error::SectorMismatch(format!(
                "sublattice map has {} entries for {n} sites",
                map.len()
            )));
        }
    }
    let sublattice = check_bipartition(&t, sublattice.as_deref(), true)?;
    let sites = sites.unwrap_or_else(|| (1..=n).map(|i| i.to_string()).collect());
    if sites.len() != n {
        return Err(Error::SectorMismatch(format!(
            "{} site labels for {n} sites",
            sites.len()
        )));
    }
    Ok(ModelSpec {
        sites,
        sublattice,
        t,
        u,
        g,
        omega,
        fourier: None,
    })
}

/// Column sums Σ_x g_xy and whether they agree to within [`TAU_SUM`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SumRuleReport {
    pub column_sums: Vec<f64>,
    /// max - min over columns.
    pub spread: f64,
    pub holds: bool,
}

pub fn check_phonon_sum_rule(g: &DMatrix<f64>) -> SumRuleReport {
    let sums: Vec<f64> = (0..g.ncols()).map(|y| g.column(y).sum()).collect();
    let max = sums.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = sums.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = if sums.is_empty() { 0.0 } else { max - min };
    SumRuleReport {
        column_sums: sums,
        spread,
        holds: spread <= TAU_SUM,
    }
}

/// U_eff = U - (2/ω) g gᵀ.
pub fn effective_interaction(u: &DMatrix<f64>, g: &DMatrix<f64>, omega: f64) -> DMatrix<f64> {
    u - (g * g.transpose()) * (2.0 / omega)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
}

impl std::fmt::Display for Definiteness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Definiteness::PositiveDefinite => write!(f, "positive definite"),
            Definiteness::PositiveSemidefinite => write!(f, "positive semidefinite"),
            Definiteness::Indefinite => write!(f, "indefinite"),
        }
    }
}

/// Classify a symmetric matrix by its smallest eigenvalue.
///
/// The cut between definite and semidefinite is [`TAU_DEF`] relative to the
/// spectral scale max|λ|, so the answer is invariant under an overall
/// rescaling of the matrix. Returns the class together with λ_min.
pub fn definiteness(m: &DMatrix<f64>) -> (Definiteness, f64) {
    if m.nrows() == 0 {
        return (Definiteness::PositiveDefinite, 0.0);
    }
    let eig = m.clone().symmetric_eigen();
    let lambda_min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = eig
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let cut = TAU_DEF * scale;
    let class = if lambda_min > cut {
        Definiteness::PositiveDefinite
    } else if lambda_min >= -cut {
        Definiteness::PositiveSemidefinite
    } else {
        Definiteness::Indefinite
    };
    (class, lambda_min)
}

/// Momentum-sample description of translation-invariant couplings.
///
/// `g_k` and `u_k` hold G(k), U(k) on the (2L)^d mesh enumerated the same way
/// as [`FourierInfo::mesh`]. Both must be even under k -> -k (mod the mesh);
/// unevenness shows up as an imaginary residue and is rejected.
#[derive(Clone, Debug)]
pub struct FourierCouplingSpec {
    pub dim: usize,
    pub l_size: usize,
    pub g_k: Vec<f64>,
    pub u_k: Vec<f64>,
}

/// Integer vectors with components in {-L+1, ..., L}, lexicographic.
fn enumerate_index_vectors(dim: usize, l_size: usize) -> Vec<Vec<i64>> {
    let lo = -(l_size as i64) + 1;
    let hi = l_size as i64;
    let mut out = vec![vec![]];
    for _ in 0..dim {
        let mut next = Vec::with_capacity(out.len() * (2 * l_size));
        for prefix in &out {
            for c in lo..=hi {
                let mut v = prefix.clone();
                v.push(c);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

fn inverse_transform(
    info_mesh: &[Vec<i64>],
    positions: &[Vec<i64>],
    samples: &[f64],
    period: f64,
) -> Result<DMatrix<f64>> {
    let n = positions.len();
    let mut out = DMatrix::zeros(n, n);
    let mut worst_imag = 0.0f64;
    let scale = samples.iter().map(|s| s.abs()).fold(1.0f64, f64::max);
    for a in 0..n {
        for b in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (ki, l) in info_mesh.iter().enumerate() {
                let prod: i64 = l
                    .iter()
                    .zip(positions[a].iter().zip(&positions[b]))
                    .map(|(l, (na, nb))| l * (na - nb))
                    .sum();
                let phase = 2.0 * std::f64::consts::PI * prod as f64 / period;
                acc += Complex64::from_polar(samples[ki], phase);
            }
            acc /= n as f64;
            worst_imag = worst_imag.max(acc.im.abs());
            out[(a, b)] = acc.re;
        }
    }
    if worst_imag > TAU_FFT * scale {
        return Err(Error::NonRealResult {
            residue: worst_imag,
            tolerance: TAU_FFT * scale,
        });
    }
    // The real part can be asymmetric at rounding level; make it exact.
    let sym = (&out + out.transpose()) * 0.5;
    Ok(sym)
}

/// Build a model on the d-dimensional torus with (2L)^d sites from momentum
/// samples of g and U, plus nearest-neighbor hopping of amplitude `t0`.
///
/// Couplings come out as
///
/// ```text
/// g_xy = (2L)^{-d} Σ_ℓ G(k_ℓ) exp(i k_ℓ·(x - y))
/// ```
///
/// which is real symmetric for even samples and satisfies the column-sum rule
/// Σ_x g_xy = G(0) exactly up to rounding. Constant samples reproduce onsite
/// couplings g0·δ_xy; G(k) = g0·cos(k·a) on a ring reproduces g0/2 on nearest
/// neighbors.
pub fn fourier_model(spec: &FourierCouplingSpec, t0: f64, omega: f64) -> Result<ModelSpec> {
    if spec.dim == 0 || spec.dim > 3 {
        return Err(Error::PreconditionFailed(format!(
            "fourier dimension must be 1..=3, got {}",
            spec.dim
        )));
    }
    if spec.l_size == 0 {
        return Err(Error::PreconditionFailed("fourier L must be >= 1".into()));
    }
    let n_points = (2 * spec.l_size).pow(spec.dim as u32);
    if spec.g_k.len() != n_points || spec.u_k.len() != n_points {
        return Err(Error::PreconditionFailed(format!(
            "expected {n_points} momentum samples, got {} for g and {} for U",
            spec.g_k.len(),
            spec.u_k.len()
        )));
    }
    let mesh = enumerate_index_vectors(spec.dim, spec.l_size);
    let positions = mesh.clone();
    let period = 2.0 * spec.l_size as f64;
    let g = inverse_transform(&mesh, &positions, &spec.g_k, period)?;
    let u = inverse_transform(&mesh, &positions, &spec.u_k, period)?;

    let n = positions.len();
    let mut t = DMatrix::zeros(n, n);
    let side = 2 * spec.l_size as i64;
    let lo = -(spec.l_size as i64) + 1;
    let mut index_of = std::collections::HashMap::new();
    for (i, p) in positions.iter().enumerate() {
        index_of.insert(p.clone(), i);
    }
    for (i, p) in positions.iter().enumerate() {
        for d in 0..spec.dim {
            for step in [-1i64, 1] {
                let mut q = p.clone();
                q[d] += step;
                // wrap into {-L+1, ..., L}
                if q[d] > spec.l_size as i64 {
                    q[d] -= side;
                } else if q[d] < lo {
                    q[d] += side;
                }
                let j = index_of[&q];
                if i != j {
                    t[(i, j)] = t0;
                }
            }
        }
    }

    let mut model = build_model(t, u, g, omega, None, None)?;
    model.fourier = Some(FourierInfo {
        dim: spec.dim,
        l_size: spec.l_size,
        mesh,
        positions,
        g_k: spec.g_k.clone(),
        u_k: spec.u_k.clone(),
    });
    Ok(model)
}

/// Ready-made small geometries used throughout the checks and the CLI.
pub mod presets {
    use super::*;

    /// Open chain of n sites, bonds i, i+1.
    pub fn chain(n: usize, t0: f64, u0: f64, g0: f64, omega: f64) -> Result<ModelSpec> {
        let mut t = DMatrix::zeros(n, n);
        for i in 0..n.saturating_sub(1) {
            t[(i, i + 1)] = t0;
            t[(i + 1, i)] = t0;
        }
        build_model(
            t,
            DMatrix::from_diagonal_element(n, n, u0),
            DMatrix::from_diagonal_element(n, n, g0),
            omega,
            None,
            None,
        )
    }

    /// Periodic ring of n sites (n even), with momentum metadata attached:
    /// the ring is the d=1, L=n/2 torus, and onsite couplings correspond to
    /// constant G(k) = g0, U(k) = u0.
    pub fn ring(n: usize, t0: f64, u0: f64, g0: f64, omega: f64) -> Result<ModelSpec> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::OddCycle);
        }
        let l_size = n / 2;
        let mut t = DMatrix::zeros(n, n);
        for i in 0..n {
            let j = (i + 1) % n;
            t[(i, j)] = t0;
            t[(j, i)] = t0;
        }
        let mut model = build_model(
            t,
            DMatrix::from_diagonal_element(n, n, u0),
            DMatrix::from_diagonal_element(n, n, g0),
            omega,
            None,
            None,
        )?;
        let mesh = super::enumerate_index_vectors(1, l_size);
        model.fourier = Some(FourierInfo {
            dim: 1,
            l_size,
            positions: mesh.clone(),
            mesh,
            g_k: vec![g0; n],
            u_k: vec![u0; n],
        });
        Ok(model)
    }

    /// Star: one center bonded to n-1 leaves. Leaves come first in the site
    /// order and form sublattice A, so |A| = n-1, |B| = 1.
    pub fn star(n: usize, t0: f64, u0: f64, g0: f64, omega: f64) -> Result<ModelSpec> {
        assert!(n >= 2, "star needs a center and at least one leaf");
        let center = n - 1;
        let mut t = DMatrix::zeros(n, n);
        for leaf in 0..center {
            t[(leaf, center)] = t0;
            t[(center, leaf)] = t0;
        }
        let mut sublattice = vec![Sublattice::A; n];
        sublattice[center] = Sublattice::B;
        let mut sites: Vec<String> = (1..n).map(|i| format!("a{i}")).collect();
        sites.push("b".into());
        build_model(
            t,
            DMatrix::from_diagonal_element(n, n, u0),
            DMatrix::from_diagonal_element(n, n, g0),
            omega,
            Some(sites),
            Some(sublattice),
        )
    }

    /// Six-site cell of the decorated (Lieb-type) chain: two corner sites,
    /// each pair of consecutive corners bridged by two decoration sites, with
    /// periodic closure. Corners form sublattice B (2 sites), decorations A
    /// (4 sites), so the imbalance gives ground spin 1 at half filling.
    ///
    /// Site order: c0 a0 b0 c1 a1 b1; bonds (c_i, a_i), (c_i, b_i),
    /// (a_i, c_{i+1}), (b_i, c_{i+1}) with indices mod 2.
    pub fn lieb_cell(t0: f64, u0: f64, g0: f64, omega: f64) -> Result<ModelSpec> {
        let n = 6;
        let bonds = [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 0), (5, 0)];
        let mut t = DMatrix::zeros(n, n);
        for (x, y) in bonds {
            t[(x, y)] = t0;
            t[(y, x)] = t0;
        }
        let sublattice = vec![
            Sublattice::B,
            Sublattice::A,
            Sublattice::A,
            Sublattice::B,
            Sublattice::A,
            Sublattice::A,
        ];
        let sites = ["c0", "a0", "b0", "c1", "a1", "b1"]
            .map(String::from)
            .to_vec();
        build_model(
            t,
            DMatrix::from_diagonal_element(n, n, u0),
            DMatrix::from_diagonal_element(n, n, g0),
            omega,
            Some(sites),
            Some(sublattice),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_site(t12: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, t12, t12, 0.0])
    }

    #[test]
    fn build_rejects_asymmetric_hopping() {
        let t = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]);
        let z = DMatrix::zeros(2, 2);
        let err = build_model(t, z.clone(), z, 1.0, None, None).unwrap_err();
        assert!(matches!(err, Error::AsymmetricMatrix { name: "t", .. }));
    }

    #[test]
    fn build_rejects_self_hopping() {
        let mut t = two_site(-1.0);
        t[(0, 0)] = 1.0;
        let z = DMatrix::zeros(2, 2);
        let err = build_model(t, z.clone(), z, 1.0, None, None).unwrap_err();
        assert!(matches!(err, Error::SameSublatticeHopping { x: 0, y: 0, .. }));
    }

    #[test]
    fn build_rejects_nonpositive_omega() {
        let z = DMatrix::zeros(2, 2);
        let err = build_model(two_site(-1.0), z.clone(), z, 0.0, None, None).unwrap_err();
        assert!(matches!(err, Error::NonPositiveOmega(_)));
    }

    #[test]
    fn triangle_has_no_bipartition() {
        let mut t = DMatrix::zeros(3, 3);
        for (x, y) in [(0, 1), (1, 2), (2, 0)] {
            t[(x, y)] = -1.0;
            t[(y, x)] = -1.0;
        }
        assert!(matches!(
            check_bipartition(&t, None, true),
            Err(Error::OddCycle)
        ));
    }

    #[test]
    fn disconnected_pair_of_bonds_is_rejected() {
        let mut t = DMatrix::zeros(4, 4);
        for (x, y) in [(0, 1), (2, 3)] {
            t[(x, y)] = -1.0;
            t[(y, x)] = -1.0;
        }
        assert!(matches!(
            check_bipartition(&t, None, true),
            Err(Error::DisconnectedLattice(2))
        ));
        // without the connectivity requirement each component is colored
        let map = check_bipartition(&t, None, false).unwrap();
        assert_eq!(map[0], Sublattice::A);
        assert_eq!(map[2], Sublattice::A);
    }

    #[test]
    fn proposed_map_violating_a_bond_is_rejected() {
        let t = two_site(-1.0);
        let bad = [Sublattice::A, Sublattice::A];
        assert!(matches!(
            check_bipartition(&t, Some(&bad), true),
            Err(Error::SameSublatticeHopping { x: 0, y: 1, .. })
        ));
    }

    #[test]
    fn ring4_bipartition_alternates() {
        let model = presets::ring(4, -1.0, 4.0, 1.0, 2.0).unwrap();
        assert_eq!(
            model.sublattice,
            vec![Sublattice::A, Sublattice::B, Sublattice::A, Sublattice::B]
        );
        assert_eq!(model.two_s_expected(), 0);
    }

    #[test]
    fn star4_counts() {
        let model = presets::star(4, -1.0, 8.0, 0.5, 1.0).unwrap();
        assert_eq!(model.sublattice_counts(), (3, 1));
        assert_eq!(model.two_s_expected(), 2);
    }

    #[test]
    fn lieb_cell_counts() {
        let model = presets::lieb_cell(-1.0, 4.0, 0.0, 1.0).unwrap();
        assert_eq!(model.sublattice_counts(), (4, 2));
        assert_eq!(model.two_s_expected(), 2);
    }

    #[test]
    fn effective_interaction_matches_double_loop() {
        // Independent O(n³) evaluation of U_xy - (2/ω) Σ_z g_xz g_yz.
        let n = 3;
        let u = DMatrix::from_row_slice(n, n, &[4.0, 1.0, 0.0, 1.0, 4.0, 1.0, 0.0, 1.0, 4.0]);
        let g = DMatrix::from_row_slice(n, n, &[1.0, 0.2, 0.0, 0.2, 1.0, 0.2, 0.0, 0.2, 1.0]);
        let omega = 2.0;
        let fast = effective_interaction(&u, &g, omega);
        for x in 0..n {
            for y in 0..n {
                let mut m = 0.0;
                for z in 0..n {
                    m += g[(x, z)] * g[(y, z)];
                }
                let want = u[(x, y)] - 2.0 / omega * m;
                assert!((fast[(x, y)] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn effective_interaction_with_zero_g_is_u() {
        let u = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 4.0]);
        let g = DMatrix::zeros(2, 2);
        assert_eq!(effective_interaction(&u, &g, 1.0), u);
    }

    #[test]
    fn definiteness_classes() {
        let pd = DMatrix::from_diagonal_element(3, 3, 3.0);
        assert_eq!(definiteness(&pd).0, Definiteness::PositiveDefinite);

        // onsite boundary case |g0| = sqrt(ω U0 / 2): U_eff has a zero eigenvalue
        let u0: f64 = 4.0;
        let omega: f64 = 2.0;
        let g0 = (omega * u0 / 2.0).sqrt();
        let u = DMatrix::from_diagonal_element(2, 2, u0);
        let g = DMatrix::from_diagonal_element(2, 2, g0);
        let ueff = effective_interaction(&u, &g, omega);
        let (class, lmin) = definiteness(&ueff);
        assert_eq!(class, Definiteness::PositiveSemidefinite);
        assert!(lmin.abs() < 1e-12);

        let mut indef = DMatrix::from_diagonal_element(2, 2, 1.0);
        indef[(1, 1)] = -1.0;
        assert_eq!(definiteness(&indef).0, Definiteness::Indefinite);
    }

    #[test]
    fn definiteness_is_permutation_invariant() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]);
        let (c0, l0) = definiteness(&m);
        // permute sites (2,0,1)
        let perm = [2usize, 0, 1];
        let mut p = DMatrix::zeros(3, 3);
        for (i, &pi) in perm.iter().enumerate() {
            p[(i, pi)] = 1.0;
        }
        let mp = &p * &m * p.transpose();
        let (c1, l1) = definiteness(&mp);
        assert_eq!(c0, c1);
        assert!((l0 - l1).abs() < 1e-12);
    }

    #[test]
    fn sum_rule_reports_constant_columns() {
        let model = presets::ring(4, -1.0, 4.0, 1.0, 2.0).unwrap();
        let rep = check_phonon_sum_rule(&model.g);
        assert!(rep.holds);
        assert!(rep.column_sums.iter().all(|s| (s - 1.0).abs() < 1e-14));

        let mut g = model.g.clone();
        g[(0, 0)] = 2.0;
        assert!(!check_phonon_sum_rule(&g).holds);
    }

    #[test]
    fn fourier_constant_samples_give_onsite_couplings() {
        let spec = FourierCouplingSpec {
            dim: 1,
            l_size: 2,
            g_k: vec![1.0; 4],
            u_k: vec![4.0; 4],
        };
        let model = fourier_model(&spec, -1.0, 2.0).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                let want_g = if x == y { 1.0 } else { 0.0 };
                let want_u = if x == y { 4.0 } else { 0.0 };
                assert!((model.g[(x, y)] - want_g).abs() < 1e-12);
                assert!((model.u[(x, y)] - want_u).abs() < 1e-12);
            }
        }
        // U_eff(k) = 4 - (2/2)·1 = 3 on the whole mesh
        let info = model.fourier.as_ref().unwrap();
        for ue in info.u_eff_k(model.omega) {
            assert!((ue - 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn fourier_cosine_samples_give_nearest_neighbor_coupling() {
        // G(k) = g0 cos k on the 4-ring puts g0/2 on each nearest-neighbor pair.
        let g0 = 0.8;
        let l_size = 2usize;
        let mesh = enumerate_index_vectors(1, l_size);
        let period = 2.0 * l_size as f64;
        let g_k: Vec<f64> = mesh
            .iter()
            .map(|l| g0 * (2.0 * std::f64::consts::PI * l[0] as f64 / period).cos())
            .collect();
        let spec = FourierCouplingSpec {
            dim: 1,
            l_size,
            g_k,
            u_k: vec![4.0; 4],
        };
        let model = fourier_model(&spec, -1.0, 2.0).unwrap();
        let info = model.fourier.as_ref().unwrap();
        for x in 0..4 {
            for y in 0..4 {
                let dist: i64 = info.positions[x][0] - info.positions[y][0];
                let want = if dist.rem_euclid(4) == 1 || dist.rem_euclid(4) == 3 {
                    g0 / 2.0
                } else {
                    0.0
                };
                assert!(
                    (model.g[(x, y)] - want).abs() < 1e-12,
                    "g[{x}][{y}] = {}, want {want}",
                    model.g[(x, y)]
                );
            }
        }
        // sum rule: Σ_x g_xy = G(0) = g0·cos(0) = g0
        let rep = check_phonon_sum_rule(&model.g);
        assert!(rep.holds);
        assert!((rep.column_sums[0] - g0).abs() < 1e-12);
    }

    #[test]
    fn fourier_uneven_samples_are_rejected() {
        // break G(-k) = G(k) between ℓ = ±1
        let spec = FourierCouplingSpec {
            dim: 1,
            l_size: 2,
            g_k: vec![0.3, 1.0, 0.7, 0.1],
            u_k: vec![4.0; 4],
        };
        assert!(matches!(
            fourier_model(&spec, -1.0, 2.0),
            Err(Error::NonRealResult { .. })
        ));
    }

    #[test]
    fn fourier_2d_torus_is_bipartite_and_connected() {
        let spec = FourierCouplingSpec {
            dim: 2,
            l_size: 1,
            g_k: vec![0.5; 4],
            u_k: vec![4.0; 4],
        };
        let model = fourier_model(&spec, -1.0, 1.0).unwrap();
        assert_eq!(model.n_sites(), 4);
        assert_eq!(model.sublattice_counts(), (2, 2));
    }
}
