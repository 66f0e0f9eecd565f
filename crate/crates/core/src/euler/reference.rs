use std::f64::consts::PI;

use crate::error::{EddyError, Result};
use crate::fourier::SpectralField;

use super::Advection;

/// Deterministic 2D Navier-Stokes `∂ξ + u·∇ξ = κΔξ` on `H_n`, returned at
/// each sorted checkpoint.
///
/// Integrating-factor RK4: the diffusion is integrated exactly by
/// `e^{−κ4π²|l|²t}` and the advection with classical RK4 steps of at most
/// `dt`, halved when the CFL bound is violated.
pub fn nse_reference(xi0: &SpectralField, kappa: f64, dt: f64, checkpoints: &[f64]) -> Result<Vec<SpectralField>> {
    if kappa.is_nan() || kappa < 0.0 {
        return Err(EddyError::invalid("kappa", format!("{kappa} must be non-negative")));
    }
    if dt.is_nan() || dt <= 0.0 {
        return Err(EddyError::invalid("dt", format!("{dt} must be positive")));
    }
    let adv = Advection::new(xi0.cutoff());
    let decay = |xi: &SpectralField, h: f64| {
        let c = -4.0 * PI * PI * kappa * h;
        let mut out = xi.clone();
        let basis = xi.basis().clone();
        for (v, m) in out.coeffs_mut().iter_mut().zip(basis.modes()) {
            *v *= (c * m.norm_sq() as f64).exp();
        }
        out
    };
    let nonlinear = |xi: &SpectralField| {
        let (d, speed) = adv.drift_and_speed(xi);
        (d.scaled(-1.0), speed)
    };
    let mut xi = xi0.clone();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(checkpoints.len());
    for &c in checkpoints {
        let mut h_max = dt;
        while t < c {
            let h = h_max.min(c - t);
            let (k1, speed) = nonlinear(&xi);
            let max_dt = adv.max_stable_dt(speed);
            if h > max_dt {
                h_max = 0.5 * h;
                if h_max < 1e-12 {
                    return Err(EddyError::Numerical {
                        path: 0,
                        time: t,
                        reason: "step size collapsed in the Navier-Stokes reference".into(),
                    });
                }
                continue;
            }
            let e_half = |f: &SpectralField| decay(f, 0.5 * h);
            let mut a = xi.clone();
            a.axpy(0.5 * h, &k1)?;
            let (k2, _) = nonlinear(&e_half(&a));
            let mut b = e_half(&xi);
            b.axpy(0.5 * h, &k2)?;
            let (k3, _) = nonlinear(&b);
            let mut cc = decay(&xi, h);
            cc.axpy(h, &e_half(&k3))?;
            let (k4, _) = nonlinear(&cc);
            let mut next = decay(&xi, h);
            next.axpy(h / 6.0, &decay(&k1, h))?;
            let mut mid = k2;
            mid.axpy(1.0, &k3)?;
            next.axpy(h / 3.0, &e_half(&mid))?;
            next.axpy(h / 6.0, &k4)?;
            xi = next;
            t = if c - (t + h) < 1e-14 * c.max(1.0) { c } else { t + h };
        }
        out.push(xi.clone());
    }
    Ok(out)
}
