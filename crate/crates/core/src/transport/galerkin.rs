use crate::error::{EddyError, Result};
use crate::fourier::{CouplingFamily, SpectralField};
use crate::levy::{check_events, JumpEvent, NoiseCoefficients};
use crate::marcus::{jump_exponential, CorrectorOperator};

/// How the linear drift `dξ/dt = Bξ` is integrated between jumps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriftIntegrator {
    /// `e^{BΔt}` through the cached eigendecomposition of `B`.
    Exact,
    /// Classical Runge-Kutta with steps of at most `dt`.
    Rk4 { dt: f64 },
}

impl DriftIntegrator {
    pub(crate) fn advance(&self, b: &CorrectorOperator, xi: SpectralField, span: f64) -> Result<SpectralField> {
        if span <= 0.0 || b.is_zero() {
            return Ok(xi);
        }
        match *self {
            DriftIntegrator::Exact => b.exp_apply(span, &xi),
            DriftIntegrator::Rk4 { dt } => {
                if dt.is_nan() || dt <= 0.0 {
                    return Err(EddyError::invalid("dt", format!("{dt} must be positive")));
                }
                let steps = (span / dt).ceil().max(1.0) as usize;
                let h = span / steps as f64;
                let mut x = xi;
                for _ in 0..steps {
                    x = rk4_linear(b, &x, h)?;
                }
                Ok(x)
            }
        }
    }
}

fn rk4_linear(b: &CorrectorOperator, x: &SpectralField, h: f64) -> Result<SpectralField> {
    let k1 = b.apply(x)?;
    let mut t = x.clone();
    t.axpy(0.5 * h, &k1)?;
    let k2 = b.apply(&t)?;
    let mut t = x.clone();
    t.axpy(0.5 * h, &k2)?;
    let k3 = b.apply(&t)?;
    let mut t = x.clone();
    t.axpy(h, &k3)?;
    let k4 = b.apply(&t)?;
    let mut out = x.clone();
    out.axpy(h / 6.0, &k1)?;
    out.axpy(h / 3.0, &k2)?;
    out.axpy(h / 3.0, &k3)?;
    out.axpy(h / 6.0, &k4)?;
    Ok(out)
}

/// Galerkin transport solution at each of the sorted `checkpoints`.
///
/// Each event applies `ξ ← e^{zθ_kA_k}ξ`; in between, `dξ/dt = Bξ` with
/// `B = drift`. When `events` holds every jump of the noise, `drift`
/// should be the corrector of the jumps that were *not* sampled.
pub fn transport_galerkin(
    xi0: &SpectralField,
    events: &[JumpEvent],
    theta: &NoiseCoefficients,
    family: &CouplingFamily,
    drift: &CorrectorOperator,
    checkpoints: &[f64],
    integrator: DriftIntegrator,
) -> Result<Vec<SpectralField>> {
    check_events(events, theta)?;
    let n = family.cutoff();
    for found in [xi0.cutoff(), drift.cutoff()] {
        if found != n {
            return Err(EddyError::CutoffMismatch { expected: n, found });
        }
    }
    if checkpoints.windows(2).any(|w| w[1] < w[0]) {
        return Err(EddyError::invalid("checkpoints", "must be sorted"));
    }
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut xi = xi0.clone();
    let mut t = 0.0;
    let mut next = events.iter().peekable();
    for &c in checkpoints {
        while let Some(e) = next.next_if(|e| e.time <= c) {
            xi = integrator.advance(drift, xi, e.time - t)?;
            t = e.time;
            let w = e.size * theta.get(e.mode).expect("checked");
            xi = jump_exponential(&family.get(e.mode), -w, &xi)?;
        }
        xi = integrator.advance(drift, xi, c - t)?;
        t = c;
        out.push(xi.clone());
    }
    Ok(out)
}
