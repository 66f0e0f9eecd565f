use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use eddy_core::fourier::{isotropy_sum, CouplingFamily};
use eddy_core::levy::{make_theta, JumpRange};
use eddy_core::marcus::{corrector_operator_in, corrector_vs_laplacian};
use eddy_core::rng::PathKey;
use eddy_core::stats::{loglog_slope, strictly_decreasing, ConvergenceRow};
use eddy_core::{eddy_viscosity, euler, transport, EddyError};
use rand::Rng;
use thiserror::Error;

use crate::config::{Config, ConfigError, ExperimentKind, DEFAULT_IDENTITY_POINTS};
use crate::report::{compare_csv, render_csv, sha256_hex, Comparison, Sidecar, CONFIG_COPY, REPORT_CSV, SIDECAR_JSON};

/// Largest entrywise deviation accepted by the identity check.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;
/// Accepted log-log slope of the corrector defect against `‖θ‖_∞`.
pub const CORRECTOR_SLOPE_RANGE: (f64, f64) = (0.5, 2.0);

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Config { path: PathBuf, source: ConfigError },
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error("{0}")]
    Numerical(EddyError),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error("replay: {0}")]
    Replay(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Invalid(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } | CliError::Replay(_) => 4,
        }
    }
}

impl From<EddyError> for CliError {
    fn from(e: EddyError) -> Self {
        match e {
            EddyError::Numerical { .. } | EddyError::CflViolation { .. } => CliError::Numerical(e),
            EddyError::Io(source) => CliError::Io { context: "i/o".into(), source },
            other => CliError::Invalid(other.to_string()),
        }
    }
}

fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

pub fn verdict(kind: ExperimentKind, rows: &[ConvergenceRow]) -> Verdict {
    let d: Vec<f64> = rows.iter().map(|r| r.d).collect();
    match kind {
        ExperimentKind::IdentityCheck => {
            let worst = d.iter().copied().fold(0.0, f64::max);
            Verdict {
                pass: worst <= IDENTITY_TOLERANCE,
                detail: format!("max deviation {worst:e} (tolerance {IDENTITY_TOLERANCE:e})"),
            }
        }
        ExperimentKind::CorrectorCheck => {
            let theta: Vec<f64> = rows.iter().map(|r| r.theta_linf).collect();
            let monotone = strictly_decreasing(&d);
            let slope = if rows.len() >= 2 { loglog_slope(&theta, &d) } else { f64::NAN };
            let (lo, hi) = CORRECTOR_SLOPE_RANGE;
            Verdict {
                pass: monotone && slope >= lo && slope <= hi,
                detail: format!(
                    "{}, log-log slope {slope:.3} (accepted [{lo}, {hi}])",
                    if monotone { "monotone" } else { "non-monotone" }
                ),
            }
        }
        ExperimentKind::TransportLimit | ExperimentKind::EulerLimit => {
            let monotone = strictly_decreasing(&d);
            Verdict { pass: monotone, detail: if monotone { "monotone" } else { "non-monotone" }.into() }
        }
    }
}

fn identity_rows(cfg: &Config) -> Result<Vec<ConvergenceRow>, EddyError> {
    let points = cfg.samples.unwrap_or(DEFAULT_IDENTITY_POINTS);
    let half = 2.0 * eddy_core::ISOTROPY_CONSTANT;
    cfg.theta
        .n_list
        .iter()
        .map(|&n| {
            let start = Instant::now();
            let theta = make_theta(n, cfg.theta.a)?;
            let mut rng = PathKey::new(cfg.seed, n as u64, 0).stream(0);
            let mut worst: f64 = 0.0;
            for _ in 0..points {
                let x = [rng.random::<f64>(), rng.random::<f64>()];
                let s = isotropy_sum(&theta, x)?;
                for (i, row) in s.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        let target = if i == j { half } else { 0.0 };
                        worst = worst.max((v - target).abs());
                    }
                }
            }
            Ok(ConvergenceRow {
                n,
                theta_linf: theta.linf(),
                d: worst,
                stderr: 0.0,
                samples: points,
                seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

fn corrector_rows(cfg: &Config) -> Result<Vec<ConvergenceRow>, EddyError> {
    let kappa = eddy_viscosity(&cfg.nu);
    let tests = cfg.test_fields(&[[1, 1]])?;
    cfg.theta
        .n_list
        .iter()
        .map(|&n| {
            let start = Instant::now();
            let theta = make_theta(n, cfg.theta.a)?;
            let cutoff = cfg.cutoffs.n_gal.unwrap_or(n);
            let family = CouplingFamily::new(cutoff);
            let b = corrector_operator_in(&theta, &cfg.nu, &family, JumpRange::Full)?;
            let mut d: f64 = 0.0;
            for phi in &tests {
                d = d.max(corrector_vs_laplacian(&b, kappa, &phi.project(cutoff))?);
            }
            Ok(ConvergenceRow {
                n,
                theta_linf: theta.linf(),
                d,
                stderr: 0.0,
                samples: 1,
                seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

/// Runs the experiment on a pool of `workers` threads (all cores if `None`).
pub fn compute(kind: ExperimentKind, cfg: &Config, workers: Option<usize>) -> Result<Vec<ConvergenceRow>, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| CliError::Invalid(format!("worker pool: {e}")))?;
    let rows = pool.install(|| match kind {
        ExperimentKind::IdentityCheck => identity_rows(cfg),
        ExperimentKind::CorrectorCheck => corrector_rows(cfg),
        ExperimentKind::TransportLimit => transport::transport_limit_experiment(&cfg.transport()?),
        ExperimentKind::EulerLimit => euler::euler_limit_experiment(&cfg.euler()?),
    })?;
    if let Some(r) = rows.iter().find(|r| !r.d.is_finite()) {
        return Err(CliError::Numerical(EddyError::Numerical {
            path: 0,
            time: f64::NAN,
            reason: format!("non-finite distance at n = {}", r.n),
        }));
    }
    Ok(rows)
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub rows: Vec<ConvergenceRow>,
    pub verdict: Verdict,
    pub out_dir: PathBuf,
}

fn load(path: &Path) -> Result<(Vec<u8>, Config), CliError> {
    let bytes = fs::read(path).map_err(io(format!("reading {}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        source: ConfigError { line: None, field: None, message: format!("not UTF-8: {e}") },
    })?;
    let cfg = Config::parse(&text).map_err(|source| CliError::Config { path: path.to_path_buf(), source })?;
    Ok((bytes, cfg))
}

fn check_kind(kind: ExperimentKind, cfg: &Config, path: &Path) -> Result<(), CliError> {
    match cfg.experiment {
        Some(k) if k != kind => Err(CliError::Config {
            path: path.to_path_buf(),
            source: ConfigError {
                line: fs::read_to_string(path).ok().and_then(|s| crate::config::locate_key(&s, "", "experiment")),
                field: Some("experiment".into()),
                message: format!("config is for `{k}` but `{kind}` was requested"),
            },
        }),
        _ => Ok(()),
    }
}

pub fn run(kind: ExperimentKind, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    let (bytes, mut cfg) = load(&opts.config)?;
    check_kind(kind, &cfg, &opts.config)?;
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    let out_dir =
        opts.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out").join(kind.name()));

    let started_at = chrono::Utc::now().to_rfc3339();
    let rows = compute(kind, &cfg, opts.workers)?;
    let finished_at = chrono::Utc::now().to_rfc3339();

    fs::create_dir_all(&out_dir).map_err(io(format!("creating {}", out_dir.display())))?;
    let sidecar = Sidecar {
        config_sha256: sha256_hex(&bytes),
        seed: cfg.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        experiment: kind.name().to_string(),
        started_at,
        finished_at,
    };
    let write = |name: &str, data: &[u8]| {
        let p = out_dir.join(name);
        fs::write(&p, data).map_err(io(format!("writing {}", p.display())))
    };
    write(REPORT_CSV, render_csv(&rows).as_bytes())?;
    write(SIDECAR_JSON, serde_json::to_string_pretty(&sidecar).expect("plain struct").as_bytes())?;
    write(CONFIG_COPY, &bytes)?;

    Ok(RunOutcome { verdict: verdict(kind, &rows), rows, out_dir })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplayOutcome {
    Match,
    Mismatch { row: usize, expected: String, found: String },
}

/// Re-runs a report from its copied config and recorded seed. `report`
/// may be the report directory or the CSV inside it.
pub fn replay(report: &Path, workers: Option<usize>) -> Result<ReplayOutcome, CliError> {
    let (dir, csv_path) = if report.is_dir() {
        (report.to_path_buf(), report.join(REPORT_CSV))
    } else {
        (report.parent().map(Path::to_path_buf).unwrap_or_default(), report.to_path_buf())
    };
    let sidecar_path = dir.join(SIDECAR_JSON);
    if !sidecar_path.is_file() {
        return Err(CliError::Replay(format!("missing sidecar {}", sidecar_path.display())));
    }
    let sidecar: Sidecar = serde_json::from_slice(&fs::read(&sidecar_path).map_err(io("reading sidecar"))?)
        .map_err(|e| CliError::Replay(format!("malformed sidecar: {e}")))?;
    let recorded = fs::read_to_string(&csv_path).map_err(io(format!("reading {}", csv_path.display())))?;
    let config_path = dir.join(CONFIG_COPY);
    let (bytes, mut cfg) = load(&config_path)?;
    if sha256_hex(&bytes) != sidecar.config_sha256 {
        return Err(CliError::Replay(format!("{} does not match the recorded config hash", config_path.display())));
    }
    let kind: ExperimentKind = serde_json::from_value(serde_json::Value::String(sidecar.experiment.clone()))
        .map_err(|_| CliError::Replay(format!("unknown experiment `{}`", sidecar.experiment)))?;
    cfg.seed = sidecar.seed;
    let rows = compute(kind, &cfg, workers)?;
    Ok(match compare_csv(&recorded, &render_csv(&rows)) {
        Comparison::Match => ReplayOutcome::Match,
        Comparison::Mismatch { row, expected, found } => ReplayOutcome::Mismatch { row, expected, found },
    })
}
