use std::time::Instant;

use rayon::prelude::*;

use crate::error::{EddyError, Result};
use crate::fourier::{CouplingFamily, SpectralField};
use crate::levy::{make_theta, sample_jumps, JumpRange, LevyMeasure, NoiseCoefficients};
use crate::marcus::{corrector_operator_in, CorrectorOperator};
use crate::rng::PathKey;
use crate::stats::{mean_stderr, ConvergenceRow};

use super::{checkpoint_times, heat_reference, transport_galerkin, DriftIntegrator, ParticleCloud};
use crate::marcus::{JumpFlowMap, SignConvention};

#[derive(Debug, Clone, PartialEq)]
pub enum TransportSolver {
    Characteristics { grid: usize },
    Galerkin { cutoff: u32, integrator: DriftIntegrator },
}

/// Whether paths are driven by sampled jumps or replaced by their mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    /// Sampled jumps with `|z| ≥ ε`, plus the corrector of the rest.
    Jumps,
    /// No jumps; the full corrector acts as a deterministic drift, which
    /// gives `E[ξ(t)]` exactly. Galerkin solver only.
    MeanField,
}

#[derive(Debug, Clone)]
pub struct TransportExperiment {
    pub n_list: Vec<u32>,
    pub a: f64,
    pub nu: LevyMeasure,
    pub horizon: f64,
    pub eps: f64,
    pub samples: usize,
    pub xi0: SpectralField,
    pub test_functions: Vec<SpectralField>,
    pub checkpoints: usize,
    pub solver: TransportSolver,
    pub noise: NoiseMode,
    pub seed: u64,
}

impl TransportExperiment {
    pub fn kappa(&self) -> f64 {
        crate::eddy_viscosity(&self.nu)
    }

    pub fn validate(&self) -> Result<()> {
        self.nu.validate()?;
        if self.n_list.is_empty() || self.n_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(EddyError::invalid("theta.n_list", "must be non-empty and strictly increasing"));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(EddyError::invalid("T", format!("{} must be positive", self.horizon)));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(EddyError::invalid("eps", format!("{} not in (0, 1)", self.eps)));
        }
        if self.samples == 0 || self.checkpoints == 0 || self.test_functions.is_empty() {
            return Err(EddyError::invalid("M", "samples, checkpoints and test functions must be non-empty"));
        }
        match &self.solver {
            TransportSolver::Characteristics { grid } => {
                if *grid == 0 {
                    return Err(EddyError::invalid("cutoffs.grid", "must be positive"));
                }
                if self.noise == NoiseMode::MeanField {
                    return Err(EddyError::invalid("noise", "mean-field runs need the Galerkin solver"));
                }
            }
            TransportSolver::Galerkin { cutoff, .. } => {
                if *cutoff < self.xi0.cutoff() {
                    return Err(EddyError::invalid("cutoffs.n_gal", "smaller than the initial condition's cutoff"));
                }
            }
        }
        Ok(())
    }
}

/// Pairings `⟨ξ(t), φ⟩` for every path, checkpoint and test function,
/// indexed `[path][checkpoint][test]`.
pub fn transport_paths(cfg: &TransportExperiment, n: u32) -> Result<Vec<Vec<Vec<f64>>>> {
    cfg.validate()?;
    let theta = make_theta(n, cfg.a)?;
    let times = checkpoint_times(cfg.horizon, cfg.checkpoints);
    match &cfg.solver {
        TransportSolver::Characteristics { grid } => {
            let cloud = ParticleCloud::uniform(*grid);
            let initial: Vec<f64> = cloud.points().iter().map(|&y| cfg.xi0.eval(y)).collect();
            (0..cfg.samples)
                .into_par_iter()
                .map(|p| characteristics_path(cfg, &theta, n, p, &cloud, &initial, &times))
                .collect()
        }
        &TransportSolver::Galerkin { cutoff, integrator } => {
            let family = CouplingFamily::new(cutoff);
            let range = match cfg.noise {
                NoiseMode::Jumps => JumpRange::Below(cfg.eps),
                NoiseMode::MeanField => JumpRange::Full,
            };
            let drift = corrector_operator_in(&theta, &cfg.nu, &family, range)?;
            let xi0 = cfg.xi0.project(cutoff);
            (0..cfg.samples)
                .into_par_iter()
                .map(|p| galerkin_path(cfg, &theta, n, p, &family, &drift, &xi0, integrator, &times))
                .collect()
        }
    }
}

fn characteristics_path(
    cfg: &TransportExperiment,
    theta: &NoiseCoefficients,
    n: u32,
    path: usize,
    cloud: &ParticleCloud,
    initial: &[f64],
    times: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let events = sample_jumps(&cfg.nu, theta, cfg.horizon, cfg.eps, PathKey::new(cfg.seed, n as u64, path as u64))?;
    let mut cloud = cloud.clone();
    let mut next = events.iter().peekable();
    let mut out = Vec::with_capacity(times.len());
    for &c in times {
        while let Some(e) = next.next_if(|e| e.time <= c) {
            let w = e.size * theta.get(e.mode).expect("sampled from the support");
            cloud.push(&JumpFlowMap::new(e.mode, w, SignConvention::Transport));
        }
        let row: Vec<f64> = cfg.test_functions.iter().map(|phi| cloud.pair(initial, |x| phi.eval(x))).collect();
        if row.iter().any(|v| !v.is_finite()) {
            return Err(EddyError::Numerical { path, time: c, reason: "non-finite pairing".into() });
        }
        out.push(row);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn galerkin_path(
    cfg: &TransportExperiment,
    theta: &NoiseCoefficients,
    n: u32,
    path: usize,
    family: &CouplingFamily,
    drift: &CorrectorOperator,
    xi0: &SpectralField,
    integrator: DriftIntegrator,
    times: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let events = match cfg.noise {
        NoiseMode::Jumps => {
            sample_jumps(&cfg.nu, theta, cfg.horizon, cfg.eps, PathKey::new(cfg.seed, n as u64, path as u64))?
        }
        NoiseMode::MeanField => Vec::new(),
    };
    let states = transport_galerkin(xi0, &events, theta, family, drift, times, integrator)?;
    let mut out = Vec::with_capacity(times.len());
    for (state, &c) in states.iter().zip(times) {
        if !state.is_finite() {
            return Err(EddyError::Numerical { path, time: c, reason: "non-finite Galerkin state".into() });
        }
        out.push(cfg.test_functions.iter().map(|phi| state.dot(phi)).collect());
    }
    Ok(out)
}

/// Heat-equation pairings `[checkpoint][test]` for the experiment.
pub(crate) fn heat_pairings(cfg: &TransportExperiment) -> Vec<Vec<f64>> {
    let kappa = cfg.kappa();
    checkpoint_times(cfg.horizon, cfg.checkpoints)
        .iter()
        .map(|&t| {
            let h = heat_reference(&cfg.xi0, kappa, t);
            cfg.test_functions.iter().map(|phi| h.dot(phi)).collect()
        })
        .collect()
}

/// Largest deviation of one path from the reference.
pub(crate) fn experiment_distance(values: &[Vec<f64>], reference: &[Vec<f64>]) -> f64 {
    values.iter().zip(reference).flat_map(|(v, r)| v.iter().zip(r).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max)
}

/// One row per `n` of `D_n = E max_{t,φ} |⟨ξⁿ(t),φ⟩ − ⟨ξ_heat(t),φ⟩|`.
pub fn transport_limit_experiment(cfg: &TransportExperiment) -> Result<Vec<ConvergenceRow>> {
    cfg.validate()?;
    let reference = heat_pairings(cfg);
    cfg.n_list
        .iter()
        .map(|&n| {
            let start = Instant::now();
            let paths = transport_paths(cfg, n)?;
            let d: Vec<f64> = paths.iter().map(|p| experiment_distance(p, &reference)).collect();
            let (mean, stderr) = mean_stderr(&d);
            Ok(ConvergenceRow {
                n,
                theta_linf: make_theta(n, cfg.a)?.linf(),
                d: mean,
                stderr,
                samples: cfg.samples,
                seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}
