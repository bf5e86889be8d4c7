//! TOML run configuration. Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use nlslab::evolution::EvolveConfig;
use nlslab::families::Profile;
use nlslab::groundstate::Method;
use nlslab::model::{Geometry, Grid, ModelParams};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub model: ModelSection,
    pub grid: GridSection,
    pub groundstate: Option<GroundstateSection>,
    pub evolve: Option<EvolveConfig>,
    pub initial: Option<InitialSpec>,
    pub classify: Option<ClassifySection>,
    pub thresholds: Option<ThresholdsSection>,
    pub verify: Option<VerifySection>,
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub d: usize,
    pub p: f64,
    #[serde(default)]
    pub gamma: f64,
    /// Defaults to `min(1, d/2)`, which is admissible in every dimension.
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub geometry: Geometry,
    #[serde(default = "default_extent")]
    pub extent: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundstateSection {
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

impl Default for GroundstateSection {
    fn default() -> Self {
        Self { omega: 1.0, method: Method::Shoot, tol: default_tol(), max_iter: default_max_iter() }
    }
}

/// Initial data: a built-in profile, a file, or (classify only) a seeded family.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum InitialSpec {
    #[serde(rename = "scaled-Q")]
    ScaledQ { amplitude: f64 },
    #[serde(rename = "gaussian")]
    Gaussian { amplitude: f64, width: f64 },
    #[serde(rename = "chirped-gaussian")]
    ChirpedGaussian { amplitude: f64, width: f64, chirp: f64 },
    #[serde(rename = "two-bump")]
    TwoBump { amplitude: f64, second: f64, offset: f64, width: f64 },
    /// A ground-state file, optionally rescaled in amplitude.
    #[serde(rename = "groundstate-file")]
    GroundstateFile {
        path: PathBuf,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Columns `x re [im]` on the configured grid.
    #[serde(rename = "tabulated")]
    Tabulated { path: PathBuf },
    /// Seeded members of `gaussian`, `chirped-gaussian`, `two-bump` or `mixed`.
    #[serde(rename = "random")]
    Random { family: String, count: usize },
}

impl InitialSpec {
    pub fn profile(&self) -> Option<Profile> {
        Some(match *self {
            InitialSpec::ScaledQ { amplitude } => Profile::ScaledQ { amplitude },
            InitialSpec::Gaussian { amplitude, width } => Profile::Gaussian { amplitude, width },
            InitialSpec::ChirpedGaussian { amplitude, width, chirp } => Profile::ChirpedGaussian { amplitude, width, chirp },
            InitialSpec::TwoBump { amplitude, second, offset, width } => Profile::TwoBump { amplitude, second, offset, width },
            _ => return None,
        })
    }

    fn path_mut(&mut self) -> Option<&mut PathBuf> {
        match self {
            InitialSpec::GroundstateFile { path, .. } | InitialSpec::Tabulated { path } => Some(path),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySection {
    /// Tabulate `r_{omega,gamma}` so the fourth (radial) pair can be decided.
    #[serde(default)]
    pub radial_threshold: bool,
    #[serde(default = "default_table_points")]
    pub table_points: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdsSection {
    #[serde(default = "default_omegas")]
    pub omegas: Vec<f64>,
    /// `(alpha, beta)` pairs; defaults to `(d, 2)`, `(1, 0)`, `(d, 1)`.
    pub pairs: Option<Vec<[f64; 2]>>,
    /// Translations for the non-attainment curve (line grids only).
    #[serde(default)]
    pub shifts: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub suites: Vec<String>,
}

/// Parallel evolutions of `amplitude * Q_{1,0}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub amplitudes: Vec<f64>,
}

fn one() -> f64 {
    1.0
}
fn default_extent() -> f64 {
    20.0
}
fn default_method() -> Method {
    Method::Shoot
}
fn default_tol() -> f64 {
    1e-6
}
fn default_max_iter() -> usize {
    5000
}
fn default_table_points() -> usize {
    9
}
fn default_omegas() -> Vec<f64> {
    vec![1.0]
}

impl RunConfig {
    /// Read, parse and validate; relative paths resolve against the config's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(p) = cfg.initial.as_mut().and_then(InitialSpec::path_mut) {
            if p.is_relative() {
                *p = base.join(&*p);
            }
            if !p.exists() {
                return Err(CliError::Usage(format!("referenced file {} does not exist", p.display())));
            }
        }
        cfg.model_params(1.0)?;
        cfg.grid()?;
        if let Some(ev) = &cfg.evolve {
            ev.validate().map_err(CliError::usage)?;
        }
        Ok(cfg)
    }

    pub fn model_params(&self, omega: f64) -> Result<ModelParams, CliError> {
        let m = self.model;
        let mu = m.mu.unwrap_or((m.d as f64 / 2.0).min(1.0));
        ModelParams::new(m.d, m.p, m.gamma, mu, omega).map_err(CliError::usage)
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Grid::new(self.grid.geometry, self.grid.extent, self.grid.n, self.model.d).map_err(CliError::usage)
    }

    pub fn groundstate(&self) -> GroundstateSection {
        self.groundstate.unwrap_or_default()
    }
}
