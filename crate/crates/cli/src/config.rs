//! Experiment configuration files.
//!
//! A config is a TOML document. Top-level keys: `experiment`, `seed`, `T`,
//! `dt`, `eps`, `M`, `checkpoints`, `test_functions`, `solver`,
//! `integrator`, `noise`, `output`. Tables: `[nu]`, `[theta]`,
//! `[initial_condition]`, `[cutoffs]`. See `configs/` for annotated examples.

use std::fmt;
use std::path::PathBuf;

use eddy_core::euler::EulerExperiment;
use eddy_core::transport::{DriftIntegrator, NoiseMode, TransportExperiment, TransportSolver};
use eddy_core::{EddyError, LevyMeasure, Mode, SpectralField};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    IdentityCheck,
    CorrectorCheck,
    TransportLimit,
    EulerLimit,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::IdentityCheck => "identity-check",
            ExperimentKind::CorrectorCheck => "corrector-check",
            ExperimentKind::TransportLimit => "transport-limit",
            ExperimentKind::EulerLimit => "euler-limit",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Characteristics,
    Galerkin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegratorKind {
    Exact,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    Jumps,
    MeanField,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaSpec {
    pub a: f64,
    pub n_list: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// `e_(1,0) + e_(1,1)`
    TwoMode,
    /// `e_(1,0) + e_(0,1) + e_(1,1)`
    ThreeMode,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCondition {
    pub preset: Option<Preset>,
    /// Entries `[k1, k2, coefficient]`.
    pub modes: Option<Vec<(i32, i32, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cutoffs {
    pub n_gal: Option<u32>,
    pub grid: Option<usize>,
}

/// A parsed, validated configuration.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub experiment: Option<ExperimentKind>,
    pub seed: u64,
    #[serde(rename = "T", default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(rename = "M")]
    pub samples: Option<usize>,
    #[serde(default = "default_checkpoints")]
    pub checkpoints: usize,
    pub test_functions: Option<Vec<[i32; 2]>>,
    pub solver: Option<SolverKind>,
    pub integrator: Option<IntegratorKind>,
    #[serde(default = "default_noise")]
    pub noise: NoiseKind,
    pub output: Option<PathBuf>,
    #[serde(default = "LevyMeasure::two_atom")]
    pub nu: LevyMeasure,
    pub theta: ThetaSpec,
    #[serde(default)]
    pub initial_condition: InitialCondition,
    #[serde(default)]
    pub cutoffs: Cutoffs,
}

fn default_horizon() -> f64 {
    0.5
}
fn default_dt() -> f64 {
    0.01
}
fn default_eps() -> f64 {
    0.1
}
fn default_checkpoints() -> usize {
    8
}
fn default_noise() -> NoiseKind {
    NoiseKind::Jumps
}

pub const DEFAULT_IDENTITY_POINTS: usize = 100;
pub const DEFAULT_TRANSPORT_SAMPLES: usize = 64;
pub const DEFAULT_EULER_SAMPLES: usize = 32;
pub const DEFAULT_PARTICLE_GRID: usize = 128;
pub const DEFAULT_EULER_N_GAL: u32 = 16;

/// Parse or validation failure, located in the source text when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(field) = &self.field {
            write!(f, "`{field}`: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Line number (1-based) of `key` inside table `table` (empty for the root).
pub fn locate_key(source: &str, table: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            current = line.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            continue;
        }
        let Some((lhs, _)) = line.split_once('=') else { continue };
        let lhs = lhs.trim().trim_matches('"');
        let (t, k) = match lhs.rsplit_once('.') {
            Some((prefix, k)) if current.is_empty() => (prefix.trim().to_string(), k.trim()),
            Some((prefix, k)) => (format!("{current}.{}", prefix.trim()), k.trim()),
            None => (current.clone(), lhs),
        };
        if t == table && k == key {
            return Some(i + 1);
        }
    }
    if key.is_empty() {
        return None;
    }
    // Fall back to the table header for keys that are absent.
    source
        .lines()
        .position(|l| l.trim().trim_matches(|c| c == '[' || c == ']').trim() == table && l.trim().starts_with('['))
        .map(|i| i + 1)
}

fn line_of_offset(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

impl Config {
    pub fn parse(source: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(source).map_err(|e| ConfigError {
            line: e.span().map(|s| line_of_offset(source, s.start)),
            field: None,
            message: e.message().trim().to_string(),
        })?;
        cfg.validate().map_err(|(field, message)| {
            let (table, key) = field.rsplit_once('.').unwrap_or(("", field.as_str()));
            ConfigError { line: locate_key(source, table, key), field: Some(field.clone()), message }
        })?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), (String, String)> {
        let bad = |f: &str, m: String| Err((f.to_string(), m));
        for (name, v) in [("T", self.horizon), ("dt", self.dt)] {
            if !(v.is_finite() && v > 0.0) {
                return bad(name, format!("must be positive, got {v}"));
            }
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad("eps", format!("must lie in (0, 1), got {}", self.eps));
        }
        if self.samples == Some(0) {
            return bad("M", "must be positive".into());
        }
        if self.checkpoints == 0 {
            return bad("checkpoints", "must be positive".into());
        }
        if !(self.theta.a > 0.0 && self.theta.a < 1.0) {
            return bad("theta.a", format!("must lie in (0, 1), got {}", self.theta.a));
        }
        let ns = &self.theta.n_list;
        if ns.is_empty() || ns[0] == 0 || ns.windows(2).any(|w| w[1] <= w[0]) {
            return bad("theta.n_list", "must be non-empty, positive and strictly increasing".into());
        }
        if let Err(e) = self.nu.validate() {
            return bad("nu.kind", e.to_string());
        }
        if let Some(tf) = &self.test_functions {
            if tf.is_empty() {
                return bad("test_functions", "must not be empty".into());
            }
            if let Some(k) = tf.iter().find(|k| Mode::new(k[0], k[1]).is_err()) {
                return bad("test_functions", format!("({}, {}) is not a nonzero mode", k[0], k[1]));
            }
        }
        match (&self.initial_condition.preset, &self.initial_condition.modes) {
            (Some(_), Some(_)) => {
                return bad("initial_condition.modes", "give either `preset` or `modes`, not both".into())
            }
            (None, Some(m)) if m.is_empty() => return bad("initial_condition.modes", "must not be empty".into()),
            (None, Some(m)) => {
                if let Some(&(a, b, _)) = m.iter().find(|&&(a, b, _)| Mode::new(a, b).is_err()) {
                    return bad("initial_condition.modes", format!("({a}, {b}) is not a nonzero mode"));
                }
            }
            _ => {}
        }
        if matches!(self.cutoffs.n_gal, Some(0)) {
            return bad("cutoffs.n_gal", "must be positive".into());
        }
        if matches!(self.cutoffs.grid, Some(0)) {
            return bad("cutoffs.grid", "must be positive".into());
        }
        if self.solver == Some(SolverKind::Galerkin) && self.cutoffs.n_gal.is_none() {
            return bad("cutoffs.n_gal", "required by the Galerkin solver".into());
        }
        if self.noise == NoiseKind::MeanField && self.solver != Some(SolverKind::Galerkin) {
            return bad("noise", "mean-field runs need `solver = \"galerkin\"`".into());
        }
        Ok(())
    }

    /// Smallest cutoff containing every given mode.
    fn cutoff_for(modes: impl Iterator<Item = Mode>) -> u32 {
        modes.map(|m| (m.norm_sq() as f64).sqrt().ceil() as u32).max().unwrap_or(1)
    }

    pub fn initial_field(&self) -> Result<SpectralField, EddyError> {
        let m = |a, b| Mode::new(a, b);
        let terms: Vec<(Mode, f64)> = match (&self.initial_condition.modes, self.initial_condition.preset) {
            (Some(modes), _) => modes.iter().map(|&(a, b, c)| Ok((m(a, b)?, c))).collect::<Result<_, EddyError>>()?,
            (None, Some(Preset::ThreeMode)) => vec![(m(1, 0)?, 1.0), (m(0, 1)?, 1.0), (m(1, 1)?, 1.0)],
            (None, _) => vec![(m(1, 0)?, 1.0), (m(1, 1)?, 1.0)],
        };
        SpectralField::from_modes(Self::cutoff_for(terms.iter().map(|t| t.0)), &terms)
    }

    pub fn test_fields(&self, default: &[[i32; 2]]) -> Result<Vec<SpectralField>, EddyError> {
        self.test_functions
            .as_deref()
            .unwrap_or(default)
            .iter()
            .map(|k| {
                let mode = Mode::new(k[0], k[1])?;
                Ok(SpectralField::basis_function(mode, Self::cutoff_for(std::iter::once(mode))))
            })
            .collect()
    }

    pub fn noise_mode(&self) -> NoiseMode {
        match self.noise {
            NoiseKind::Jumps => NoiseMode::Jumps,
            NoiseKind::MeanField => NoiseMode::MeanField,
        }
    }

    pub fn transport(&self) -> Result<TransportExperiment, EddyError> {
        let solver = match self.solver.unwrap_or(SolverKind::Characteristics) {
            SolverKind::Characteristics => {
                TransportSolver::Characteristics { grid: self.cutoffs.grid.unwrap_or(DEFAULT_PARTICLE_GRID) }
            }
            SolverKind::Galerkin => TransportSolver::Galerkin {
                cutoff: self.cutoffs.n_gal.unwrap_or(DEFAULT_EULER_N_GAL),
                integrator: match self.integrator.unwrap_or(IntegratorKind::Exact) {
                    IntegratorKind::Exact => DriftIntegrator::Exact,
                    IntegratorKind::Rk4 => DriftIntegrator::Rk4 { dt: self.dt },
                },
            },
        };
        let cfg = TransportExperiment {
            n_list: self.theta.n_list.clone(),
            a: self.theta.a,
            nu: self.nu.clone(),
            horizon: self.horizon,
            eps: self.eps,
            samples: self.samples.unwrap_or(DEFAULT_TRANSPORT_SAMPLES),
            xi0: self.initial_field()?,
            test_functions: self.test_fields(&[[1, 0], [0, 1], [1, 1]])?,
            checkpoints: self.checkpoints,
            solver,
            noise: self.noise_mode(),
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn euler(&self) -> Result<EulerExperiment, EddyError> {
        let cfg = EulerExperiment {
            n_list: self.theta.n_list.clone(),
            a: self.theta.a,
            nu: self.nu.clone(),
            horizon: self.horizon,
            dt: self.dt,
            eps: self.eps,
            samples: self.samples.unwrap_or(DEFAULT_EULER_SAMPLES),
            n_gal: self.cutoffs.n_gal.unwrap_or(DEFAULT_EULER_N_GAL),
            xi0: self.initial_field()?,
            test_functions: self.test_fields(&[[1, 0], [0, 1], [1, 1]])?,
            checkpoints: self.checkpoints,
            noise: self.noise_mode(),
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
