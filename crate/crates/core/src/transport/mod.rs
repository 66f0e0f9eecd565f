//! Stochastic linear transport `dξ + σ·∇ξ ⋄ dZ = 0`: characteristics and
//! Galerkin solvers, and the scaling experiment against the heat equation.

mod characteristics;
mod experiment;
mod galerkin;

pub use characteristics::{transport_characteristics, ParticleCloud};
pub(crate) use experiment::experiment_distance;
pub use experiment::{transport_limit_experiment, transport_paths, NoiseMode, TransportExperiment, TransportSolver};
pub use galerkin::{transport_galerkin, DriftIntegrator};

use std::f64::consts::PI;

use crate::fourier::SpectralField;

/// `e^{κtΔ} ξ₀`.
pub fn heat_reference(xi0: &SpectralField, kappa: f64, t: f64) -> SpectralField {
    let c = -4.0 * PI * PI * kappa * t;
    xi0.map_modes(|m| (c * m.norm_sq() as f64).exp())
}

/// `k/count · T` for `k = 1..=count`.
pub fn checkpoint_times(horizon: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|k| horizon * k as f64 / count as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::Mode;

    #[test]
    fn heat_examples() {
        let e = SpectralField::basis_function(Mode::new(1, 0).unwrap(), 2);
        let h = heat_reference(&e, 1.0 / 16.0, 1.0);
        assert!((h.coeff(Mode::new(1, 0).unwrap()) - (-PI * PI / 4.0).exp()).abs() < 1e-15);
        assert_eq!(heat_reference(&e, 1.0 / 16.0, 0.0), e);
        let f =
            SpectralField::from_modes(3, &[(Mode::new(1, 2).unwrap(), 1.0), (Mode::new(-3, 0).unwrap(), 0.5)]).unwrap();
        let mut prev = f.norm();
        for t in [0.01, 0.1, 0.5, 1.0] {
            let n = heat_reference(&f, 0.1, t).norm();
            assert!(n <= prev);
            prev = n;
        }
    }

    #[test]
    fn checkpoints() {
        let c = checkpoint_times(0.5, 8);
        assert_eq!(c.len(), 8);
        assert_eq!(c[7], 0.5);
        assert!(c[0] > 0.0);
    }
}
