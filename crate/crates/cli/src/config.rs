//! Run configuration. A run is described by one TOML file with three
//! sections: `[model]` picks the lattice and couplings in exactly one of
//! three styles (named preset, explicit matrices, or momentum samples),
//! `[run]` selects checks and grids, `[output]` says what to write where.
//! The full grammar is documented in the README; everything is validated
//! here, at parse time.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::Deserialize;

use hhed::model::{build_model, fourier_model, presets, FourierCouplingSpec, ModelSpec, Sublattice};
use hhed::solve::spectrum::DENSE_LIMIT_DEFAULT;

pub const DEFAULT_M_VALUES: &[i64] = &[0];
pub const DEFAULT_CUTOFFS: &[usize] = &[2, 4, 6];
pub const DEFAULT_THETA_GRID: &[f64] = &[1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
pub const DEFAULT_U0_GRID: &[f64] = &[2.0, 4.0, 8.0, 16.0, 32.0];

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid `{field}`: {message}")]
    Validation { field: &'static str, message: String },
    #[error(transparent)]
    Model(#[from] hhed::Error),
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation { field, message: message.into() }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: ModelSection,
    #[serde(default)]
    run: RunSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    preset: Option<String>,
    n: Option<usize>,
    t0: Option<f64>,
    u0: Option<f64>,
    g0: Option<f64>,
    omega: Option<f64>,
    t: Option<Vec<Vec<f64>>>,
    u: Option<Vec<Vec<f64>>>,
    g: Option<Vec<Vec<f64>>>,
    sites: Option<Vec<String>>,
    sublattice: Option<Vec<String>>,
    fourier: Option<FourierSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FourierSection {
    d: usize,
    l: usize,
    g_k: Vec<f64>,
    u_k: Vec<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    checks: Option<Vec<String>>,
    m_values: Option<Vec<i64>>,
    cutoffs: Option<Vec<usize>>,
    theta_grid: Option<Vec<f64>>,
    u0_grid: Option<Vec<f64>>,
    k_indices: Option<Vec<usize>>,
    max_dim: Option<usize>,
    threads: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<PathBuf>,
    formats: Option<Vec<String>>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CheckName {
    Conditions,
    Uniqueness,
    TotalSpin,
    SignPattern,
    Lro,
    Charge,
    Adiabatic,
    Heisenberg,
}

impl CheckName {
    pub const ALL: [CheckName; 8] = [
        CheckName::Conditions,
        CheckName::Uniqueness,
        CheckName::TotalSpin,
        CheckName::SignPattern,
        CheckName::Lro,
        CheckName::Charge,
        CheckName::Adiabatic,
        CheckName::Heisenberg,
    ];

    /// What `verify` runs when no checks are named: the ground-state
    /// structure suite. The limit checks and the susceptibility bound put
    /// extra demands on the model (zero coupling, momentum metadata) and
    /// are opt-in.
    pub const DEFAULT: [CheckName; 5] = [
        CheckName::Conditions,
        CheckName::Uniqueness,
        CheckName::TotalSpin,
        CheckName::SignPattern,
        CheckName::Lro,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Conditions => "conditions",
            CheckName::Uniqueness => "uniqueness",
            CheckName::TotalSpin => "total_spin",
            CheckName::SignPattern => "sign_pattern",
            CheckName::Lro => "lro",
            CheckName::Charge => "charge",
            CheckName::Adiabatic => "adiabatic",
            CheckName::Heisenberg => "heisenberg",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = CheckName::ALL.iter().map(|c| c.as_str()).collect();
                format!("unknown check `{s}`; known checks: {}", known.join(", "))
            })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Formats {
    pub json: bool,
    pub csv: bool,
    pub summary: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Formats { json: true, csv: true, summary: true }
    }
}

/// A fully validated run: the model is built, grids are checked, names are
/// resolved. Command-line overrides are applied on top by the caller.
#[derive(Debug)]
pub struct RunPlan {
    pub model: ModelSpec,
    pub checks: Option<Vec<CheckName>>,
    pub m_values: Vec<i64>,
    pub cutoffs: Vec<usize>,
    pub theta_grid: Vec<f64>,
    pub u0_grid: Vec<f64>,
    pub k_indices: Option<Vec<usize>>,
    pub max_dim: usize,
    pub threads: usize,
    pub out_dir: Option<PathBuf>,
    pub formats: Formats,
}

pub fn parse_config(text: &str) -> Result<RunPlan, ConfigError> {
    let file: FileConfig = toml::from_str(text)?;
    let model = build_from_section(&file.model)?;
    let run = &file.run;

    let checks = match &run.checks {
        None => None,
        Some(names) => {
            let mut list = Vec::with_capacity(names.len());
            for name in names {
                list.push(name.parse().map_err(|e: String| invalid("run.checks", e))?);
            }
            Some(list)
        }
    };

    let m_values = run.m_values.clone().unwrap_or_else(|| DEFAULT_M_VALUES.to_vec());
    if m_values.is_empty() {
        return Err(invalid("run.m_values", "at least one sector is required"));
    }
    let cutoffs = run.cutoffs.clone().unwrap_or_else(|| DEFAULT_CUTOFFS.to_vec());
    require_increasing_usize("run.cutoffs", &cutoffs)?;
    let theta_grid = run.theta_grid.clone().unwrap_or_else(|| DEFAULT_THETA_GRID.to_vec());
    require_increasing_f64("run.theta_grid", &theta_grid)?;
    let u0_grid = run.u0_grid.clone().unwrap_or_else(|| DEFAULT_U0_GRID.to_vec());
    require_increasing_f64("run.u0_grid", &u0_grid)?;

    if let Some(ks) = &run.k_indices {
        let n_points = model.fourier.as_ref().map(|f| f.n_points());
        match n_points {
            None => {
                return Err(invalid(
                    "run.k_indices",
                    "the model carries no momentum mesh; use a fourier block or a \
                     translation-invariant preset",
                ))
            }
            Some(np) => {
                if let Some(&bad) = ks.iter().find(|&&k| k >= np) {
                    return Err(invalid(
                        "run.k_indices",
                        format!("index {bad} out of range for a {np}-point mesh"),
                    ));
                }
            }
        }
    }

    let threads = run.threads.unwrap_or(1);
    if threads == 0 {
        return Err(invalid("run.threads", "must be at least 1"));
    }

    let formats = match &file.output.formats {
        None => Formats::default(),
        Some(names) => {
            let mut f = Formats { json: false, csv: false, summary: false };
            for name in names {
                match name.as_str() {
                    "json" => f.json = true,
                    "csv" => f.csv = true,
                    "summary" => f.summary = true,
                    other => {
                        return Err(invalid(
                            "output.formats",
                            format!("unknown format `{other}`; known: json, csv, summary"),
                        ))
                    }
                }
            }
            f
        }
    };

    Ok(RunPlan {
        model,
        checks,
        m_values,
        cutoffs,
        theta_grid,
        u0_grid,
        k_indices: run.k_indices.clone(),
        max_dim: run.max_dim.unwrap_or(DENSE_LIMIT_DEFAULT),
        threads,
        out_dir: file.output.dir.clone(),
        formats,
    })
}

fn require_increasing_usize(field: &'static str, grid: &[usize]) -> Result<(), ConfigError> {
    if grid.is_empty() {
        return Err(invalid(field, "grid is empty"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid(field, "grid must be strictly increasing"));
    }
    Ok(())
}

fn require_increasing_f64(field: &'static str, grid: &[f64]) -> Result<(), ConfigError> {
    if grid.is_empty() {
        return Err(invalid(field, "grid is empty"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid(field, "grid must be strictly increasing"));
    }
    Ok(())
}

/// Preset names take the site count either as the `n` key or fused into the
/// name itself: `star4` is `star` with `n = 4`.
fn split_preset(name: &str) -> (&str, Option<usize>) {
    let trimmed = name.trim_end_matches(|c: char| c.is_ascii_digit());
    if trimmed.len() == name.len() {
        (name, None)
    } else {
        (trimmed, name[trimmed.len()..].parse().ok())
    }
}

fn to_matrix(field: &'static str, rows: &[Vec<f64>]) -> Result<DMatrix<f64>, ConfigError> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(invalid(field, format!("expected a square {n}x{n} array of arrays")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn build_from_section(m: &ModelSection) -> Result<ModelSpec, ConfigError> {
    let styles = [
        m.preset.is_some(),
        m.t.is_some() || m.u.is_some() || m.g.is_some(),
        m.fourier.is_some(),
    ];
    if styles.iter().filter(|&&s| s).count() != 1 {
        return Err(invalid(
            "model",
            "specify exactly one of: preset, explicit matrices (t, u, g), fourier block",
        ));
    }
    let omega = m.omega.ok_or_else(|| invalid("model.omega", "omega required"))?;
    let t0 = m.t0.unwrap_or(-1.0);

    if let Some(name) = &m.preset {
        for (key, present) in [
            ("model.t", m.t.is_some()),
            ("model.u", m.u.is_some()),
            ("model.g", m.g.is_some()),
            ("model.sites", m.sites.is_some()),
            ("model.sublattice", m.sublattice.is_some()),
        ] {
            if present {
                return Err(invalid("model", format!("`{key}` does not apply to a preset")));
            }
        }
        let u0 = m.u0.unwrap_or(0.0);
        let g0 = m.g0.unwrap_or(0.0);
        let (kind, n_from_name) = split_preset(name);
        if n_from_name.is_some() && m.n.is_some() {
            return Err(invalid("model.n", format!("site count is already part of `{name}`")));
        }
        let n = n_from_name.or(m.n);
        let need_n = |n: Option<usize>| {
            n.ok_or_else(|| invalid("model.n", format!("preset `{kind}` needs a site count")))
        };
        let spec = match kind {
            "chain" => presets::chain(need_n(n)?, t0, u0, g0, omega)?,
            "ring" => presets::ring(need_n(n)?, t0, u0, g0, omega)?,
            "star" => presets::star(need_n(n)?, t0, u0, g0, omega)?,
            "lieb-cell" => {
                if n.is_some() {
                    return Err(invalid("model.n", "the lieb-cell preset is six sites, fixed"));
                }
                presets::lieb_cell(t0, u0, g0, omega)?
            }
            other => {
                return Err(invalid(
                    "model.preset",
                    format!("unknown preset `{other}`; known: chain, ring, star, lieb-cell"),
                ))
            }
        };
        return Ok(spec);
    }

    if let Some(f) = &m.fourier {
        for (key, present) in [
            ("model.n", m.n.is_some()),
            ("model.u0", m.u0.is_some()),
            ("model.g0", m.g0.is_some()),
            ("model.sites", m.sites.is_some()),
            ("model.sublattice", m.sublattice.is_some()),
        ] {
            if present {
                return Err(invalid("model", format!("`{key}` does not apply to a fourier block")));
            }
        }
        let spec = FourierCouplingSpec {
            dim: f.d,
            l_size: f.l,
            g_k: f.g_k.clone(),
            u_k: f.u_k.clone(),
        };
        return Ok(fourier_model(&spec, t0, omega)?);
    }

    for (key, present) in [
        ("model.n", m.n.is_some()),
        ("model.t0", m.t0.is_some()),
        ("model.u0", m.u0.is_some()),
        ("model.g0", m.g0.is_some()),
    ] {
        if present {
            return Err(invalid("model", format!("`{key}` does not apply to explicit matrices")));
        }
    }
    let (t, u, g) = match (&m.t, &m.u, &m.g) {
        (Some(t), Some(u), Some(g)) => {
            (to_matrix("model.t", t)?, to_matrix("model.u", u)?, to_matrix("model.g", g)?)
        }
        _ => return Err(invalid("model", "explicit matrices need all three of t, u, g")),
    };
    let sublattice = match &m.sublattice {
        None => None,
        Some(labels) => {
            let mut map = Vec::with_capacity(labels.len());
            for l in labels {
                map.push(match l.as_str() {
                    "A" => Sublattice::A,
                    "B" => Sublattice::B,
                    other => {
                        return Err(invalid(
                            "model.sublattice",
                            format!("labels are \"A\" or \"B\", got `{other}`"),
                        ))
                    }
                });
            }
            Some(map)
        }
    };
    Ok(build_model(t, u, g, omega, m.sites.clone(), sublattice)?)
}
