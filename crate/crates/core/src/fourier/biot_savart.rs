//! Biot-Savart law on the torus and the spectral curl and divergence.

use std::f64::consts::PI;

use super::SpectralField;

/// A velocity field stored componentwise in the real basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Velocity {
    pub u1: SpectralField,
    pub u2: SpectralField,
}

/// Mean-free divergence-free velocity with vorticity `xi`:
/// `u = ∇^⊥ψ = (∂₂ψ, −∂₁ψ)` where `−Δψ = xi`.
pub fn biot_savart(xi: &SpectralField) -> Velocity {
    let scale = 1.0 / (4.0 * PI * PI);
    let psi = xi.map_modes(|m| scale / m.norm_sq() as f64);
    Velocity { u1: psi.derivative(1), u2: psi.derivative(0).scaled(-1.0) }
}

/// `∂₁u₂ − ∂₂u₁`.
pub fn curl(u: &Velocity) -> SpectralField {
    let mut w = u.u2.derivative(0);
    w.axpy(-1.0, &u.u1.derivative(1)).expect("velocity components share a cutoff");
    w
}

/// `∂₁u₁ + ∂₂u₂`.
pub fn divergence(u: &Velocity) -> SpectralField {
    let mut d = u.u1.derivative(0);
    d.axpy(1.0, &u.u2.derivative(1)).expect("velocity components share a cutoff");
    d
}
