//! `hhed`: config-driven runs of the ground-state checks.
//!
//! Every subcommand reads the same TOML config; flags override the file.
//! Exit status is the worst verdict across whatever ran: 0 all pass,
//! 2 something inconclusive, 1 something failed or errored, 64 usage.

mod config;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::exit;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hhed::hilbert::{build_sector_basis, SectorKey};
use hhed::ops::hamiltonian::assemble_hh_hamiltonian;
use hhed::ops::spin::spin_square_expectation;
use hhed::solve::{
    cutoff_sweep, ground_spectrum_opts, theta_sweep, SolveOptions, SweepResult, SweepRow,
};
use hhed::verify::{
    charge_susceptibility, check_conditions, verify_adiabatic_limit, verify_heisenberg_limit,
    verify_lro_inequality, verify_sector_uniqueness, verify_sign_pattern, verify_total_spin,
    VerificationReport,
};

use config::{parse_config, CheckName, RunPlan};
use report::{exit_code, human_summary, susceptibility_csv, sweep_csv, ModelSummary, RunReport};

#[derive(Parser)]
#[command(
    name = "hhed",
    version,
    about = "Exact-diagonalization checks for electron-phonon models on bipartite clusters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the lattice and classify the screened interaction
    CheckConditions(CommonArgs),
    /// Print low-lying spectra for the requested magnetization sectors
    Solve(CommonArgs),
    /// Run the ground-state structure checks and write reports
    Verify(CommonArgs),
    /// Charge susceptibility against its screening bound on the momentum mesh
    Susceptibility(CommonArgs),
    /// Tabulate a cutoff, omega-scale, or interaction sweep
    Sweep(SweepArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Run only the named checks (repeatable); overrides the config list
    #[arg(long = "check")]
    checks: Vec<String>,
    /// Output directory; overrides [output] dir
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for independent checks; overrides [run] threads
    #[arg(long)]
    threads: Option<usize>,
    /// Largest dimension diagonalized densely; overrides [run] max_dim
    #[arg(long)]
    max_dim: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which knob to sweep
    #[arg(long)]
    param: SweepParam,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepParam {
    /// Phonon truncation over [run] cutoffs
    Cutoff,
    /// Phonon frequency scale over [run] theta_grid
    Theta,
    /// Hubbard interaction over [run] u0_grid
    U0,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            exit(code);
        }
    };
    match run(cli) {
        Ok(code) => exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            exit(1);
        }
    }
}

type AnyError = Box<dyn std::error::Error + Send + Sync>;

fn load_plan(args: &CommonArgs) -> Result<RunPlan, AnyError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| format!("cannot read {}: {e}", args.config.display()))?;
    let mut plan = parse_config(&text)?;
    if let Some(out) = &args.out {
        plan.out_dir = Some(out.clone());
    }
    if let Some(threads) = args.threads {
        if threads == 0 {
            return Err("--threads must be at least 1".into());
        }
        plan.threads = threads;
    }
    if let Some(max_dim) = args.max_dim {
        plan.max_dim = max_dim;
    }
    if !args.checks.is_empty() {
        let mut list = Vec::with_capacity(args.checks.len());
        for name in &args.checks {
            list.push(name.parse::<CheckName>()?);
        }
        plan.checks = Some(list);
    }
    Ok(plan)
}

fn solve_options(plan: &RunPlan) -> SolveOptions {
    SolveOptions { dense_limit: plan.max_dim }
}

fn run(cli: Cli) -> Result<i32, AnyError> {
    match cli.command {
        Command::CheckConditions(args) => {
            let plan = load_plan(&args)?;
            let report = RunReport {
                model: ModelSummary::of(&plan.model),
                checks: vec![check_conditions(&plan.model)],
            };
            emit(&plan, &report, &[])?;
            Ok(exit_code(&report.checks))
        }
        Command::Verify(args) => {
            let plan = load_plan(&args)?;
            let checks = plan
                .checks
                .clone()
                .unwrap_or_else(|| CheckName::DEFAULT.to_vec());
            let opts = solve_options(&plan);
            let results = run_checks(&plan, &checks, &opts)?;
            let report = RunReport {
                model: ModelSummary::of(&plan.model),
                checks: results,
            };
            emit(&plan, &report, &[])?;
            Ok(exit_code(&report.checks))
        }
        Command::Susceptibility(args) => {
            let plan = load_plan(&args)?;
            let opts = solve_options(&plan);
            let check = charge_susceptibility(
                &plan.model,
                &plan.cutoffs,
                plan.k_indices.as_deref(),
                &opts,
            )?;
            let table = susceptibility_csv(&check);
            let report = RunReport {
                model: ModelSummary::of(&plan.model),
                checks: vec![check],
            };
            emit(&plan, &report, &[("susceptibility.csv", table)])?;
            Ok(exit_code(&report.checks))
        }
        Command::Solve(args) => {
            let plan = load_plan(&args)?;
            run_solve(&plan)?;
            Ok(0)
        }
        Command::Sweep(args) => {
            let plan = load_plan(&args.common)?;
            run_sweep(&plan, args.param)
        }
    }
}

/// Dispatch one named check. Each check is internally sequential, so the
/// numbers it produces are independent of how many workers run siblings.
fn run_check(
    name: CheckName,
    plan: &RunPlan,
    opts: &SolveOptions,
) -> hhed::Result<VerificationReport> {
    match name {
        CheckName::Conditions => Ok(check_conditions(&plan.model)),
        CheckName::Uniqueness => {
            verify_sector_uniqueness(&plan.model, &plan.m_values, &plan.cutoffs, opts)
        }
        CheckName::TotalSpin => verify_total_spin(&plan.model, &plan.cutoffs, opts),
        CheckName::SignPattern => verify_sign_pattern(&plan.model, &plan.cutoffs, opts),
        CheckName::Lro => verify_lro_inequality(&plan.model, &plan.cutoffs, opts),
        CheckName::Charge => {
            charge_susceptibility(&plan.model, &plan.cutoffs, plan.k_indices.as_deref(), opts)
        }
        CheckName::Adiabatic => {
            verify_adiabatic_limit(&plan.model, &plan.theta_grid, &plan.cutoffs, opts)
        }
        CheckName::Heisenberg => verify_heisenberg_limit(&plan.model, &plan.u0_grid, opts),
    }
}

fn run_checks(
    plan: &RunPlan,
    checks: &[CheckName],
    opts: &SolveOptions,
) -> Result<Vec<VerificationReport>, AnyError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.threads)
        .build()?;
    let results: Vec<hhed::Result<VerificationReport>> = pool.install(|| {
        use rayon::prelude::*;
        checks.par_iter().map(|&name| run_check(name, plan, opts)).collect()
    });
    let mut reports = Vec::with_capacity(results.len());
    for (name, result) in checks.iter().zip(results) {
        reports.push(result.map_err(|e| format!("check {name}: {e}"))?);
    }
    Ok(reports)
}

fn run_solve(plan: &RunPlan) -> Result<(), AnyError> {
    let n = plan.model.n_sites();
    let cutoff = *plan.cutoffs.last().unwrap();
    let opts = solve_options(plan);
    println!("half filling, n_ph_max={cutoff}");
    for &m in &plan.m_values {
        let key = SectorKey { n_el: n, two_m: 2 * m, n_ph_max: cutoff };
        let basis = build_sector_basis(n, key)?;
        let h = assemble_hh_hamiltonian(&plan.model, &basis)?;
        let spectrum = ground_spectrum_opts(&h, 2, &opts)?;
        let spin_square = spin_square_expectation(&basis, &spectrum.ground_vectors[0]);
        println!(
            "M={m}: dim={} solver={:?} E0={:.12} E1={:.12} gap={:.12} degeneracy={} spin_square={:.12}",
            basis.dimension(),
            spectrum.solver,
            spectrum.e0(),
            spectrum.eigenvalues.get(1).copied().unwrap_or(f64::INFINITY),
            spectrum.gap,
            spectrum.degeneracy,
            spin_square,
        );
    }
    Ok(())
}

/// At every grid point the reference model has no phonon coupling, so a
/// zero cutoff is exact and each row stands on its own.
fn u0_sweep(plan: &RunPlan, opts: &SolveOptions) -> Result<SweepResult, AnyError> {
    let n = plan.model.n_sites();
    let two_m = 2 * plan.m_values[0];
    let mut rows: Vec<SweepRow> = Vec::with_capacity(plan.u0_grid.len());
    for &u0 in &plan.u0_grid {
        let hubbard = plan.model.hubbard_at(u0);
        let point = cutoff_sweep(&hubbard, n, two_m, &[0], opts)?;
        let mut row = point.rows.into_iter().next().unwrap();
        row.parameter = u0;
        rows.push(row);
    }
    Ok(SweepResult {
        parameter_name: "u0".into(),
        rows,
        converged: true,
        reference: None,
    })
}

fn run_sweep(plan: &RunPlan, param: SweepParam) -> Result<i32, AnyError> {
    let n = plan.model.n_sites();
    let two_m = 2 * plan.m_values[0];
    let opts = solve_options(plan);
    let result = match param {
        SweepParam::Cutoff => cutoff_sweep(&plan.model, n, two_m, &plan.cutoffs, &opts)?,
        SweepParam::Theta => theta_sweep(
            &plan.model,
            n,
            two_m,
            *plan.cutoffs.last().unwrap(),
            &plan.theta_grid,
            &opts,
        )?,
        SweepParam::U0 => u0_sweep(plan, &opts)?,
    };
    let csv = sweep_csv(&result);
    print!("{csv}");
    if !result.converged {
        println!("unconverged: extend the {} grid", result.parameter_name);
    }
    if let Some(dir) = &plan.out_dir {
        fs::create_dir_all(dir)?;
        let stem = format!("sweep_{}", result.parameter_name);
        if plan.formats.csv {
            fs::write(dir.join(format!("{stem}.csv")), &csv)?;
        }
        if plan.formats.json {
            let json = serde_json::to_string_pretty(&result)?;
            fs::write(dir.join(format!("{stem}.json")), json + "\n")?;
        }
    }
    Ok(if result.converged { 0 } else { 2 })
}

fn emit(
    plan: &RunPlan,
    report: &RunReport,
    tables: &[(&str, String)],
) -> Result<(), AnyError> {
    let summary = human_summary(report);
    print!("{summary}");
    if let Some(dir) = &plan.out_dir {
        fs::create_dir_all(dir)?;
        if plan.formats.json {
            let json = serde_json::to_string_pretty(report)?;
            fs::write(dir.join("report.json"), json + "\n")?;
        }
        if plan.formats.summary {
            fs::write(dir.join("summary.txt"), &summary)?;
        }
        if plan.formats.csv {
            for (name, table) in tables {
                fs::write(dir.join(name), table)?;
            }
        }
    }
    Ok(())
}
