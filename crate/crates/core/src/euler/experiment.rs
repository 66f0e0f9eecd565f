use std::time::Instant;

use rayon::prelude::*;

use crate::error::{EddyError, Result};
use crate::fourier::{CouplingFamily, SpectralField};
use crate::levy::{make_theta, sample_jumps, JumpRange, LevyMeasure};
use crate::marcus::corrector_operator_in;
use crate::rng::PathKey;
use crate::stats::{mean_stderr, ConvergenceRow};
use crate::transport::{checkpoint_times, NoiseMode};

use super::{euler_path, nse_reference, Advection};

#[derive(Debug, Clone)]
pub struct EulerExperiment {
    pub n_list: Vec<u32>,
    pub a: f64,
    pub nu: LevyMeasure,
    pub horizon: f64,
    pub dt: f64,
    pub eps: f64,
    pub samples: usize,
    pub n_gal: u32,
    pub xi0: SpectralField,
    pub test_functions: Vec<SpectralField>,
    pub checkpoints: usize,
    pub noise: NoiseMode,
    pub seed: u64,
}

impl EulerExperiment {
    pub fn kappa(&self) -> f64 {
        crate::eddy_viscosity(&self.nu)
    }

    pub fn validate(&self) -> Result<()> {
        self.nu.validate()?;
        if self.n_list.is_empty() || self.n_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(EddyError::invalid("theta.n_list", "must be non-empty and strictly increasing"));
        }
        let n_max = *self.n_list.last().unwrap();
        if self.n_gal < 2 * n_max {
            return Err(EddyError::invalid(
                "cutoffs.n_gal",
                format!("{} is below 2·max(n_list) = {}", self.n_gal, 2 * n_max),
            ));
        }
        if self.n_gal < self.xi0.cutoff() {
            return Err(EddyError::invalid("cutoffs.n_gal", "smaller than the initial condition's cutoff"));
        }
        for (name, v) in [("T", self.horizon), ("dt", self.dt)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(EddyError::invalid(name, format!("{v} must be positive")));
            }
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(EddyError::invalid("eps", format!("{} not in (0, 1)", self.eps)));
        }
        if self.samples == 0 || self.checkpoints == 0 || self.test_functions.is_empty() {
            return Err(EddyError::invalid("M", "samples, checkpoints and test functions must be non-empty"));
        }
        Ok(())
    }

    /// Navier-Stokes pairings `[checkpoint][test]` at viscosity `κ = C₂μ₂`.
    pub fn reference_pairings(&self) -> Result<Vec<Vec<f64>>> {
        let times = checkpoint_times(self.horizon, self.checkpoints);
        let traj = nse_reference(&self.xi0.project(self.n_gal), self.kappa(), self.dt, &times)?;
        Ok(traj.iter().map(|xi| self.test_functions.iter().map(|phi| xi.dot(phi)).collect()).collect())
    }
}

/// Pairings `⟨ξⁿ(t), φ⟩` indexed `[path][checkpoint][test]`.
pub fn euler_paths(cfg: &EulerExperiment, n: u32) -> Result<Vec<Vec<Vec<f64>>>> {
    cfg.validate()?;
    let theta = make_theta(n, cfg.a)?;
    let family = CouplingFamily::new(cfg.n_gal);
    let range = match cfg.noise {
        NoiseMode::Jumps => JumpRange::Below(cfg.eps),
        NoiseMode::MeanField => JumpRange::Full,
    };
    let drift = corrector_operator_in(&theta, &cfg.nu, &family, range)?;
    let adv = Advection::new(cfg.n_gal);
    let times = checkpoint_times(cfg.horizon, cfg.checkpoints);
    let xi0 = cfg.xi0.project(cfg.n_gal);
    (0..cfg.samples)
        .into_par_iter()
        .map(|p| {
            let events = match cfg.noise {
                NoiseMode::Jumps => {
                    sample_jumps(&cfg.nu, &theta, cfg.horizon, cfg.eps, PathKey::new(cfg.seed, n as u64, p as u64))?
                }
                NoiseMode::MeanField => Vec::new(),
            };
            let states = euler_path(&xi0, &events, &theta, &family, &drift, &adv, cfg.dt, &times, p, |_, _, _| {})?;
            Ok(states.iter().map(|xi| cfg.test_functions.iter().map(|phi| xi.dot(phi)).collect()).collect())
        })
        .collect()
}

/// One row per `n` of `D_n = E max_{t,φ} |⟨ξⁿ(t),φ⟩ − ⟨ξ_NS(t),φ⟩|`.
pub fn euler_limit_experiment(cfg: &EulerExperiment) -> Result<Vec<ConvergenceRow>> {
    cfg.validate()?;
    let reference = cfg.reference_pairings()?;
    cfg.n_list
        .iter()
        .map(|&n| {
            let start = Instant::now();
            let paths = euler_paths(cfg, n)?;
            let d: Vec<f64> = paths.iter().map(|p| crate::transport::experiment_distance(p, &reference)).collect();
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
