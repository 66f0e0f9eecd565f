//! Spectral simulation of transport and 2D Euler equations on the torus
//! driven by Marcus-sense Lévy transport noise.
//!
//! The crate is organised bottom-up:
//!
//! * [`fourier`]: the real trigonometric basis on `T²`, noise fields and
//!   the mode-coupling operators built from them.
//! * [`levy`]: Lévy measures and jump sampling.
//! * [`marcus`]: jump maps on the Galerkin space and the corrector.
//! * [`transport`]: solvers for the linear transport equation.
//! * [`euler`]: the stochastic Euler solver and its Navier-Stokes reference.
//! * [`stats`]: convergence rows and summary statistics.

pub mod error;
pub mod euler;
pub mod fourier;
pub mod levy;
pub mod marcus;
pub mod rng;
pub mod stats;
pub mod transport;

pub use error::{EddyError, Result};
pub use fourier::{Basis, Mode, Partition, SpectralField};
pub use levy::{JumpEvent, LevyMeasure, NoiseCoefficients};

/// Dimensional constant of the isotropy identity in two dimensions:
/// `Σ θ_k² σ_k ⊗ σ_k = 2·C₂·I`.
///
/// Confirmed by brute-force summation in `fourier::isotropy` tests.
pub const ISOTROPY_CONSTANT: f64 = 0.25;

/// Eddy viscosity `κ = C₂ · ∫ z² ν(dz)` for a Lévy measure.
pub fn eddy_viscosity(nu: &LevyMeasure) -> f64 {
    ISOTROPY_CONSTANT * nu.second_moment()
}
