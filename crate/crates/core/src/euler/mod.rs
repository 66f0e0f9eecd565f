//! Stochastic 2D Euler in vorticity form on `H_n`, driven by Marcus jumps,
//! and the deterministic Navier-Stokes reference.

mod dump;
mod experiment;
mod reference;

pub use dump::{read_trajectory, write_trajectory, Trajectory};
pub use experiment::{euler_limit_experiment, euler_paths, EulerExperiment};
pub use reference::nse_reference;

use std::f64::consts::TAU;

use crate::error::{EddyError, Result};
use crate::fourier::{biot_savart, CouplingFamily, SpectralField, SpectralGrid, Velocity};
use crate::levy::{JumpEvent, NoiseCoefficients};
use crate::marcus::{jump_exponential, CorrectorOperator};

/// Dealiased evaluation of `Π_n(u·∇ξ)` with `u` the Biot-Savart velocity.
#[derive(Debug, Clone)]
pub struct Advection {
    cutoff: u32,
    grid: SpectralGrid,
}

impl Advection {
    pub fn new(cutoff: u32) -> Self {
        Self { cutoff, grid: SpectralGrid::for_products(cutoff) }
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    /// `Π_n(u·∇ξ)` together with `max_x |u(x)|` on the grid.
    pub fn drift_and_speed(&self, xi: &SpectralField) -> (SpectralField, f64) {
        let u = biot_savart(xi);
        let g = &self.grid;
        let (u1, u2) = (g.synthesize(&u.u1), g.synthesize(&u.u2));
        let (d1, d2) = (g.synthesize(&xi.derivative(0)), g.synthesize(&xi.derivative(1)));
        let mut speed: f64 = 0.0;
        let prod: Vec<f64> = (0..u1.len())
            .map(|p| {
                speed = speed.max(u1[p].hypot(u2[p]));
                u1[p] * d1[p] + u2[p] * d2[p]
            })
            .collect();
        (g.analyze(&prod, xi.cutoff()), speed)
    }

    pub fn drift(&self, xi: &SpectralField) -> SpectralField {
        self.drift_and_speed(xi).0
    }

    /// Largest step allowed by `dt·max|u|·2πn ≤ 1/2`.
    pub fn max_stable_dt(&self, speed: f64) -> f64 {
        if speed == 0.0 {
            f64::INFINITY
        } else {
            0.5 / (speed * TAU * self.cutoff as f64)
        }
    }
}

/// `Π_n(u·∇ξ)`.
pub fn nonlinear_drift(xi: &SpectralField) -> SpectralField {
    Advection::new(xi.cutoff()).drift(xi)
}

/// Vorticity at a time, with a lazily recomputed velocity.
#[derive(Debug, Clone)]
pub struct EulerState {
    time: f64,
    vorticity: SpectralField,
    velocity: Option<Velocity>,
}

impl EulerState {
    pub fn new(time: f64, vorticity: SpectralField) -> Self {
        Self { time, vorticity, velocity: None }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn vorticity(&self) -> &SpectralField {
        &self.vorticity
    }

    pub fn set(&mut self, time: f64, vorticity: SpectralField) {
        self.time = time;
        self.vorticity = vorticity;
        self.velocity = None;
    }

    pub fn velocity(&mut self) -> &Velocity {
        self.velocity.get_or_insert_with(|| biot_savart(&self.vorticity))
    }
}

fn rhs(adv: &Advection, b: &CorrectorOperator, xi: &SpectralField) -> Result<(SpectralField, f64)> {
    let (n, speed) = adv.drift_and_speed(xi);
    let mut out = b.apply(xi)?;
    out.axpy(-1.0, &n)?;
    Ok((out, speed))
}

/// One RK4 step of `dξ/dt = −Π_n(u·∇ξ) + Bξ`.
///
/// Fails with [`EddyError::CflViolation`] if `dt` exceeds the advective
/// bound at the start of the step.
pub fn euler_step_between_jumps(
    state: &EulerState,
    adv: &Advection,
    b: &CorrectorOperator,
    dt: f64,
) -> Result<EulerState> {
    if dt == 0.0 {
        return Ok(state.clone());
    }
    let xi = &state.vorticity;
    let (k1, speed) = rhs(adv, b, xi)?;
    let max_dt = adv.max_stable_dt(speed);
    if dt > max_dt {
        return Err(EddyError::CflViolation { dt, max_dt });
    }
    let stage = |k: &SpectralField, c: f64| -> Result<SpectralField> {
        let mut t = xi.clone();
        t.axpy(c, k)?;
        Ok(t)
    };
    let (k2, _) = rhs(adv, b, &stage(&k1, 0.5 * dt)?)?;
    let (k3, _) = rhs(adv, b, &stage(&k2, 0.5 * dt)?)?;
    let (k4, _) = rhs(adv, b, &stage(&k3, dt)?)?;
    let mut out = xi.clone();
    out.axpy(dt / 6.0, &k1)?;
    out.axpy(dt / 3.0, &k2)?;
    out.axpy(dt / 3.0, &k3)?;
    out.axpy(dt / 6.0, &k4)?;
    Ok(EulerState::new(state.time + dt, out))
}

/// `ξ ← e^{−zθ_kA_k}ξ`.
pub fn euler_apply_jump(
    state: &mut EulerState,
    event: &JumpEvent,
    theta: &NoiseCoefficients,
    family: &CouplingFamily,
) -> Result<()> {
    let th = theta.get(event.mode).ok_or(EddyError::ModeOutsideSupport(event.mode))?;
    let next = jump_exponential(&family.get(event.mode), event.size * th, &state.vorticity)?;
    state.set(event.time.max(state.time), next);
    Ok(())
}

/// What the path driver reports to an observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathStep {
    Drift,
    /// A jump, with the vorticity norm just before it.
    Jump {
        norm_before: f64,
    },
}

/// Integrates one path of the stochastic Euler system and returns the
/// vorticity at each sorted checkpoint.
///
/// Steps are at most `dt`, land exactly on event times and checkpoints, and
/// are halved on CFL violation down to `1e−12`.
#[allow(clippy::too_many_arguments)]
pub fn euler_path(
    xi0: &SpectralField,
    events: &[JumpEvent],
    theta: &NoiseCoefficients,
    family: &CouplingFamily,
    drift: &CorrectorOperator,
    adv: &Advection,
    dt: f64,
    checkpoints: &[f64],
    path: usize,
    mut observe: impl FnMut(f64, &SpectralField, PathStep),
) -> Result<Vec<SpectralField>> {
    crate::levy::check_events(events, theta)?;
    let mut state = EulerState::new(0.0, xi0.clone());
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = events.iter().peekable();
    for &c in checkpoints {
        loop {
            let target = match next.peek() {
                Some(e) if e.time <= c => e.time,
                _ => c,
            };
            advance(&mut state, adv, drift, dt, target, path, &mut observe)?;
            match next.next_if(|e| e.time <= c) {
                Some(e) => {
                    let before = state.vorticity.norm();
                    euler_apply_jump(&mut state, e, theta, family)?;
                    observe(state.time, &state.vorticity, PathStep::Jump { norm_before: before });
                }
                None => break,
            }
        }
        out.push(state.vorticity.clone());
    }
    Ok(out)
}

fn advance(
    state: &mut EulerState,
    adv: &Advection,
    b: &CorrectorOperator,
    dt: f64,
    target: f64,
    path: usize,
    observe: &mut impl FnMut(f64, &SpectralField, PathStep),
) -> Result<()> {
    let mut h = dt;
    while state.time < target {
        let step = h.min(target - state.time);
        match euler_step_between_jumps(state, adv, b, step) {
            Ok(mut next) => {
                if !next.vorticity.is_finite() {
                    return Err(EddyError::Numerical { path, time: state.time, reason: "non-finite vorticity".into() });
                }
                if target - next.time < 1e-14 * target.max(1.0) {
                    next.time = target;
                }
                *state = next;
                observe(state.time, &state.vorticity, PathStep::Drift);
            }
            Err(EddyError::CflViolation { max_dt, .. }) => {
                h = 0.5 * step.min(h);
                if h < 1e-12 {
                    return Err(EddyError::Numerical {
                        path,
                        time: state.time,
                        reason: format!("step size collapsed below 1e-12 (CFL bound {max_dt:e})"),
                    });
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
