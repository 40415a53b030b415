//! The acceptance gate. Every release-blocking property of the engine is
//! exercised here at its stated tolerance and runtime budget, end to end:
//! through the binary where the property is about runs and reports, through
//! the library where it is about operators and spectra.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::Value;

use hhed::hilbert::{
    build_sector_basis, combined_word, enumerate_fermion_sector, enumerate_phonon_states,
    SectorKey,
};
use hhed::model::{presets, ModelSpec};
use hhed::ops::fermion::{annihilator, Spin};
use hhed::ops::hamiltonian::assemble_hh_hamiltonian;
use hhed::ops::phonon::phonon_annihilator;
use hhed::ops::spin::{lift_fermion_op, total_spin_square};
use hhed::ops::SparseOperator;
use hhed::solve::{ground_spectrum_opts, SolveOptions, SolverKind};
use hhed::verify::{verify_heisenberg_limit, verify_lro_inequality, verify_sign_pattern, Verdict};

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

struct CliRun {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_cli(args: &[&str]) -> CliRun {
    let out = Command::new(env!("CARGO_BIN_EXE_hhed"))
        .args(args)
        .output()
        .expect("binary should run");
    CliRun {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path
}

fn load_report(dir: &Path) -> Value {
    let text = fs::read_to_string(dir.join("report.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["check"] == name)
        .unwrap_or_else(|| panic!("report lacks check {name}"))
}

fn measured(check: &Value, name: &str) -> f64 {
    check["measured"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["name"] == name)
        .and_then(|v| v["value"].as_f64())
        .unwrap_or_else(|| panic!("check lacks measured value {name}"))
}

fn assert_within(elapsed: Duration, budget: Duration, what: &str) {
    assert!(
        elapsed <= budget,
        "{what} took {elapsed:?}, budget {budget:?}"
    );
}

/// check-conditions on the ring and star presets at U0=4, g0=1, omega=2:
/// structural hypotheses hold and the screened interaction is positive
/// definite with smallest eigenvalue 4 - (2/2)*1 = 3.
#[test]
fn screening_classification_on_the_presets() {
    for preset in ["ring4", "star4"] {
        let tmp = tempfile::tempdir().unwrap();
        let out = tmp.path().join("out");
        let config = write_config(
            tmp.path(),
            &format!(
                "[model]\npreset = \"{preset}\"\nt0 = -1.0\nu0 = 4.0\ng0 = 1.0\nomega = 2.0\n"
            ),
        );
        let start = Instant::now();
        let run = run_cli(&[
            "check-conditions",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_within(start.elapsed(), Duration::from_secs(1), preset);
        assert_eq!(run.code, 0, "{preset}: {}\n{}", run.stdout, run.stderr);

        let report = load_report(&out);
        let conditions = check(&report, "conditions");
        assert_eq!(conditions["verdict"], "pass", "{preset}");
        let lambda_min = measured(conditions, "lambda_min");
        assert!(
            (lambda_min - 3.0).abs() <= 1e-10,
            "{preset}: lambda_min = {lambda_min}"
        );
        for p in conditions["preconditions"].as_array().unwrap() {
            assert_eq!(p["holds"], true, "{preset}: {}", p["name"]);
        }
    }
}

fn full_fock_annihilator(n: usize, site: usize, spin: Spin) -> DMatrix<Complex64> {
    let dim = 1usize << (2 * n);
    let mut a = DMatrix::from_element(dim, dim, c(0.0));
    for n_up in 0..=n {
        for n_dn in 0..=n {
            let (to_up, to_dn) = match spin {
                Spin::Up => (n_up as i64 - 1, n_dn as i64),
                Spin::Dn => (n_up as i64, n_dn as i64 - 1),
            };
            if to_up < 0 || to_dn < 0 {
                continue;
            }
            let from =
                enumerate_fermion_sector(n, n_up + n_dn, n_up as i64 - n_dn as i64).unwrap();
            let to = enumerate_fermion_sector(n, (to_up + to_dn) as usize, to_up - to_dn).unwrap();
            let block = annihilator(&from, &to, site, spin).unwrap();
            for (r, col, v) in block.iter_entries() {
                let gr = combined_word(n, to.states[r]) as usize;
                let gc = combined_word(n, from.states[col]) as usize;
                a[(gr, gc)] += v;
            }
        }
    }
    a
}

fn commutator_defect(h: &SparseOperator, other: &SparseOperator) -> f64 {
    h.matmul(other).add_scaled(&other.matmul(h), c(-1.0)).max_abs()
}

fn sector_battery() -> Vec<(ModelSpec, SectorKey)> {
    let star = presets::star(4, -1.0, 8.0, 0.5, 1.0).unwrap();
    let ring = presets::ring(4, -1.0, 4.0, 1.0, 2.0).unwrap();
    let chain = presets::chain(2, -1.0, 4.0, 0.7, 1.5).unwrap();
    let lieb = presets::lieb_cell(-1.0, 6.0, 0.4, 2.0).unwrap();
    vec![
        (star.clone(), SectorKey { n_el: 4, two_m: 0, n_ph_max: 2 }),
        (star, SectorKey { n_el: 4, two_m: 4, n_ph_max: 2 }),
        (ring.clone(), SectorKey { n_el: 4, two_m: 2, n_ph_max: 2 }),
        (ring, SectorKey { n_el: 3, two_m: 1, n_ph_max: 1 }),
        (chain, SectorKey { n_el: 2, two_m: 0, n_ph_max: 5 }),
        (lieb, SectorKey { n_el: 6, two_m: 2, n_ph_max: 1 }),
    ]
}

/// Canonical fermion and (below the truncation grade) boson identities as
/// matrix identities at 1e-13 for up to three sites, and vanishing
/// commutators of every battery Hamiltonian with S^3, S_tot^2, N_el at
/// 1e-12 per unit of ‖H‖_max.
#[test]
fn operator_identities_hold_on_small_lattices() {
    let start = Instant::now();
    let tau = 1e-13;

    for n in 1..=3usize {
        let dim = 1usize << (2 * n);
        let modes: Vec<DMatrix<Complex64>> = (0..n)
            .flat_map(|site| [Spin::Up, Spin::Dn].map(|s| full_fock_annihilator(n, site, s)))
            .collect();
        for (i, a) in modes.iter().enumerate() {
            for (j, b) in modes.iter().enumerate() {
                let mixed = a * b.adjoint() + b.adjoint() * a;
                let expected = if i == j {
                    DMatrix::from_diagonal_element(dim, dim, c(1.0))
                } else {
                    DMatrix::from_element(dim, dim, c(0.0))
                };
                let defect = (&mixed - &expected).map(|z| z.norm()).max();
                assert!(defect <= tau, "{{a_{i}, a_{j}^+}} defect {defect} at n={n}");
                let same = a * b + b * a;
                let defect = same.map(|z| z.norm()).max();
                assert!(defect <= tau, "{{a_{i}, a_{j}}} defect {defect} at n={n}");
            }
        }

        let cutoff = 3;
        let phonons = enumerate_phonon_states(n, cutoff);
        for x in 0..n {
            for y in 0..n {
                let bx = phonon_annihilator(&phonons, x);
                let by_dag = phonon_annihilator(&phonons, y).adjoint();
                let comm = bx
                    .matmul(&by_dag)
                    .add_scaled(&by_dag.matmul(&bx), c(-1.0))
                    .to_dense();
                for col in 0..phonons.len() {
                    if phonons.states[col].total() >= cutoff {
                        continue;
                    }
                    for row in 0..phonons.len() {
                        let expected = if x == y && row == col { 1.0 } else { 0.0 };
                        assert!(
                            (comm[(row, col)] - c(expected)).norm() <= tau,
                            "[b_{x}, b_{y}^+] defect at n={n}"
                        );
                    }
                }
            }
        }
    }

    for (model, key) in sector_battery() {
        let basis = build_sector_basis(model.n_sites(), key).unwrap();
        let h = assemble_hh_hamiltonian(&model, &basis).unwrap();
        let tol = 1e-12 * h.max_abs();
        assert!(
            commutator_defect(&h, &total_spin_square(&basis)) <= tol,
            "[H, S_tot^2] defect in {key:?}"
        );
        let s3_diag: Vec<f64> = basis
            .fermions
            .states
            .iter()
            .map(|f| (f.up.count_ones() as f64 - f.dn.count_ones() as f64) / 2.0)
            .collect();
        let s3 =
            lift_fermion_op(&SparseOperator::from_real_diagonal(&s3_diag), basis.phonons.len());
        assert!(commutator_defect(&h, &s3) <= tol, "[H, S^3] defect in {key:?}");
        let n_diag: Vec<f64> = basis
            .fermions
            .states
            .iter()
            .map(|f| (f.up.count_ones() + f.dn.count_ones()) as f64)
            .collect();
        let n_el =
            lift_fermion_op(&SparseOperator::from_real_diagonal(&n_diag), basis.phonons.len());
        assert!(commutator_defect(&h, &n_el) <= tol, "[H, N_el] defect in {key:?}");
    }

    assert_within(start.elapsed(), Duration::from_secs(10), "operator identities");
}

/// Dense and Lanczos paths agree to 1e-10 on every battery sector of
/// dimension at most 2000, and both reproduce the two-site Hubbard ground
/// energy 2 - 2*sqrt(2) to 1e-12.
#[test]
fn eigensolvers_cross_check_and_match_the_closed_form() {
    let start = Instant::now();
    for (model, key) in sector_battery() {
        let basis = build_sector_basis(model.n_sites(), key).unwrap();
        assert!(basis.dimension() <= 2000);
        let h = assemble_hh_hamiltonian(&model, &basis).unwrap();
        let dense = ground_spectrum_opts(&h, 2, &SolveOptions { dense_limit: 2000 }).unwrap();
        let lanczos = ground_spectrum_opts(&h, 2, &SolveOptions { dense_limit: 0 }).unwrap();
        assert_eq!(dense.solver, SolverKind::Dense);
        assert_eq!(lanczos.solver, SolverKind::Lanczos);
        let k = dense.eigenvalues.len().min(lanczos.eigenvalues.len());
        for i in 0..k {
            assert!(
                (dense.eigenvalues[i] - lanczos.eigenvalues[i]).abs() <= 1e-10,
                "eigenvalue {i} disagrees in {key:?}"
            );
        }
    }

    let hubbard = presets::chain(2, -1.0, 4.0, 0.0, 1.0).unwrap();
    let basis = build_sector_basis(2, SectorKey { n_el: 2, two_m: 0, n_ph_max: 2 }).unwrap();
    let h = assemble_hh_hamiltonian(&hubbard, &basis).unwrap();
    let want = 2.0 - 2.0 * 2.0_f64.sqrt();
    for limit in [2000, 0] {
        let e0 = ground_spectrum_opts(&h, 1, &SolveOptions { dense_limit: limit }).unwrap().e0();
        assert!((e0 - want).abs() <= 1e-12, "E0 = {e0}, want {want}");
    }
    assert_within(start.elapsed(), Duration::from_secs(30), "solver cross-check");
}

const STAR_CONFIG: &str = "[model]\npreset = \"star4\"\nt0 = -1.0\nu0 = 8.0\ng0 = 0.5\n\
                           omega = 1.0\n\n[run]\nm_values = [-1, 0, 1]\ncutoffs = [2, 4, 6]\n";

/// Star at U0=8, g0=0.5, omega=1, converged cutoff: unique M=0 ground
/// state, total spin S=1 from spin_square = 2 within 1e-6, a three-state
/// multiplet across M in {-1,0,1}, and strictly higher energy outside it.
#[test]
fn star_ground_state_is_a_spin_one_multiplet() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let config = write_config(tmp.path(), STAR_CONFIG);
    let start = Instant::now();
    let run = run_cli(&[
        "verify",
        "--config",
        config.to_str().unwrap(),
        "--check",
        "uniqueness",
        "--check",
        "total_spin",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_within(start.elapsed(), Duration::from_secs(120), "star verify");
    assert_eq!(run.code, 0, "{}\n{}", run.stdout, run.stderr);

    let report = load_report(&out);
    let uniqueness = check(&report, "uniqueness");
    assert_eq!(uniqueness["verdict"], "pass");
    assert_eq!(measured(uniqueness, "degeneracy(M=0)"), 1.0);

    let spin = check(&report, "total_spin");
    assert_eq!(spin["verdict"], "pass");
    assert!((measured(spin, "spin_square") - 2.0).abs() <= 1e-6);
    assert_eq!(measured(spin, "ground_degeneracy"), 3.0);
    assert!(measured(spin, "excess_outside_multiplet") > 1e-8);
    assert_eq!(measured(spin, "degeneracy(M=-2)"), 1.0);
    assert_eq!(measured(spin, "degeneracy(M=2)"), 1.0);
}

/// The transverse correlation sign pattern is strict on both motivating
/// lattices at the same couplings: positive within a sublattice, negative
/// across, margin above 1e-10 for every pair.
#[test]
fn sign_pattern_is_strict_on_ring_and_star() {
    let opts = SolveOptions::default();
    let cutoffs = [2usize, 4, 6];
    for model in [
        presets::ring(4, -1.0, 8.0, 0.5, 1.0).unwrap(),
        presets::star(4, -1.0, 8.0, 0.5, 1.0).unwrap(),
    ] {
        let report = verify_sign_pattern(&model, &cutoffs, &opts).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        let margin = report.value("margin").unwrap();
        assert!(margin > 1e-10, "margin = {margin}");
    }
}

/// Staggered order dominates on the star: m(Q) >= m(0) - 1e-10 with
/// m(0) > 0, and the per-site value is part of the report.
#[test]
fn staggered_order_dominates_on_the_star() {
    let model = presets::star(4, -1.0, 8.0, 0.5, 1.0).unwrap();
    let report = verify_lro_inequality(&model, &[2, 4, 6], &SolveOptions::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Pass);
    let m0 = report.value("m_uniform").unwrap();
    let mq = report.value("m_staggered").unwrap();
    assert!(mq >= m0 - 1e-10, "m(Q) = {mq} < m(0) = {m0}");
    assert!(m0 > 0.0, "m(0) = {m0}");
    let per_site = report.value("m_uniform_per_site").unwrap();
    assert!((per_site - m0 / 4.0).abs() <= 1e-12);
}

/// Ring at U0=4, g0=1, omega=2 has U_eff(k) = 3 at every momentum: the
/// susceptibility stays below 1/3 + 1e-8 on the whole mesh and vanishes
/// identically at k = 0.
#[test]
fn charge_susceptibility_respects_the_screening_bound() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let config = write_config(
        tmp.path(),
        "[model]\npreset = \"ring4\"\nt0 = -1.0\nu0 = 4.0\ng0 = 1.0\nomega = 2.0\n\n\
         [run]\ncutoffs = [4, 6, 8]\n",
    );
    let start = Instant::now();
    let run = run_cli(&[
        "susceptibility",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_within(start.elapsed(), Duration::from_secs(120), "susceptibility");
    assert_eq!(run.code, 0, "{}\n{}", run.stdout, run.stderr);

    let report = load_report(&out);
    let charge = check(&report, "charge_susceptibility");
    assert_eq!(charge["verdict"], "pass");
    let mesh = ["k[-1]", "k[0]", "k[1]", "k[2]"];
    for label in mesh {
        let chi = measured(charge, &format!("chi({label})"));
        assert!(chi <= 1.0 / 3.0 + 1e-8, "chi({label}) = {chi}");
    }
    let chi_zero = measured(charge, "chi(k[0])");
    assert_eq!(chi_zero, 0.0, "chi at k = 0 must vanish exactly");

    let csv = fs::read_to_string(out.join("susceptibility.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + mesh.len());
}

/// Two-site model, omega scaled by theta in {1,...,32}: the overlap with
/// the Hubbard ground state (phonon vacuum attached) rises monotonically
/// to at least 0.99, the gap stays open, the total spin never moves, and
/// the energy lands within 1e-3 of the Hubbard value.
#[test]
fn large_frequency_limit_reaches_the_hubbard_ground_state() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let config = write_config(
        tmp.path(),
        "[model]\npreset = \"chain2\"\nt0 = -1.0\nu0 = 4.0\ng0 = 0.1\nomega = 1.0\n\n\
         [run]\nchecks = [\"adiabatic\"]\ncutoffs = [2, 4, 6]\n\
         theta_grid = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0]\n",
    );
    let start = Instant::now();
    let run = run_cli(&[
        "verify",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_within(start.elapsed(), Duration::from_secs(60), "adiabatic verify");
    assert_eq!(run.code, 0, "{}\n{}", run.stdout, run.stderr);

    let report = load_report(&out);
    let adiabatic = check(&report, "adiabatic");
    assert_eq!(adiabatic["verdict"], "pass");

    let rows: Vec<&Value> = adiabatic["trace"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["parameter"].as_str().unwrap().starts_with("theta="))
        .collect();
    assert_eq!(rows.len(), 6);
    let mut spins = Vec::new();
    let mut previous = f64::NEG_INFINITY;
    for row in &rows {
        let of = |name: &str| {
            row["values"]
                .as_array()
                .unwrap()
                .iter()
                .find(|v| v["name"] == name)
                .unwrap()["value"]
                .as_f64()
                .unwrap()
        };
        let overlap = of("overlap");
        assert!(overlap >= previous, "overlap fell: {overlap} after {previous}");
        previous = overlap;
        assert!(of("gap") > 0.0);
        spins.push(of("spin_square"));
    }
    assert!(previous >= 0.99, "final overlap = {previous}");
    let spin_spread = spins.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - spins.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spin_spread <= 1e-8, "spin drift {spin_spread}");

    let e0_final = measured(adiabatic, "e0_final");
    let e0_hubbard = measured(adiabatic, "e0_hubbard");
    assert!((e0_final - e0_hubbard).abs() <= 1e-3);
}

/// Strong coupling: on two sites u0 times the singlet-triplet gap lands
/// within 5% of the spin-exchange value 4t^2 at the largest u0; on the
/// star, the Hubbard and Heisenberg ground spins agree (both S=1) at
/// every u0.
#[test]
fn strong_coupling_matches_the_spin_exchange() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let config = write_config(
        tmp.path(),
        "[model]\npreset = \"chain2\"\nt0 = -1.0\nu0 = 4.0\ng0 = 0.0\nomega = 1.0\n\n\
         [run]\nchecks = [\"heisenberg\"]\nu0_grid = [2.0, 4.0, 8.0, 16.0, 32.0]\n",
    );
    let run = run_cli(&[
        "verify",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 0, "{}\n{}", run.stdout, run.stderr);
    let report = load_report(&out);
    let heis = check(&report, "heisenberg_limit");
    assert_eq!(heis["verdict"], "pass");
    assert!(measured(heis, "relative_gap_error") <= 0.05);
    assert!((measured(heis, "heisenberg_gap") - 4.0).abs() <= 1e-9);

    let star = presets::star(4, -1.0, 0.0, 0.0, 1.0).unwrap();
    let report =
        verify_heisenberg_limit(&star, &[2.0, 4.0, 8.0, 16.0, 32.0], &SolveOptions::default())
            .unwrap();
    assert_eq!(report.verdict, Verdict::Pass);
    assert!((report.value("spin_square_heisenberg").unwrap() - 2.0).abs() <= 1e-6);
    assert!(report.value("max_spin_square_mismatch").unwrap() <= 1e-6);
}

fn assert_numbers_close(a: &Value, b: &Value, tol: f64, path: &str) {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            assert!((x - y).abs() <= tol, "{path}: {x} vs {y}");
        }
        (Value::Array(xs), Value::Array(ys)) => {
            assert_eq!(xs.len(), ys.len(), "{path}: array lengths differ");
            for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
                assert_numbers_close(x, y, tol, &format!("{path}[{i}]"));
            }
        }
        (Value::Object(xm), Value::Object(ym)) => {
            let keys: Vec<&String> = xm.keys().collect();
            assert_eq!(keys, ym.keys().collect::<Vec<_>>(), "{path}: keys differ");
            for k in keys {
                assert_numbers_close(&xm[k], &ym[k], tol, &format!("{path}.{k}"));
            }
        }
        _ => assert_eq!(a, b, "{path}: values differ"),
    }
}

/// One config, two thread counts: every number in the emitted report agrees
/// to 1e-12.
#[test]
fn reports_are_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "[model]\npreset = \"chain4\"\nt0 = -1.0\nu0 = 4.0\ng0 = 0.5\nomega = 2.0\n\n\
         [run]\ncutoffs = [2, 4, 6]\n",
    );
    let mut reports = Vec::new();
    for threads in ["1", "4"] {
        let out = tmp.path().join(format!("out{threads}"));
        let run = run_cli(&[
            "verify",
            "--config",
            config.to_str().unwrap(),
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(run.code, 0, "threads={threads}: {}\n{}", run.stdout, run.stderr);
        reports.push(load_report(&out));
    }
    assert_numbers_close(&reports[0], &reports[1], 1e-12, "report");
}
