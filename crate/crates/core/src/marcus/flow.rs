use crate::error::Result;
use crate::fourier::{coupling_matrix, sigma_field, Mode, SigmaField, SpectralField, SpectralGrid};

use super::jump_exponential;

/// Which way a jump of size `w` moves points along `σ_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignConvention {
    /// `x ↦ x − wσ_k(x)`
    Transport,
    /// `x ↦ x + wσ_k(x)`
    Euler,
}

impl SignConvention {
    fn sign(self) -> f64 {
        match self {
            SignConvention::Transport => -1.0,
            SignConvention::Euler => 1.0,
        }
    }

    fn flipped(self) -> Self {
        match self {
            SignConvention::Transport => SignConvention::Euler,
            SignConvention::Euler => SignConvention::Transport,
        }
    }
}

/// Time-one flow of the jump vector field `±w σ_k`.
///
/// Since `σ_k·∇σ_k = 0`, `σ_k` is constant along its own integral curves,
/// so the flow is the straight-line map `x ↦ x ± wσ_k(x)` and the maps
/// with opposite conventions are mutual inverses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpFlowMap {
    sigma: SigmaField,
    amplitude: f64,
    convention: SignConvention,
}

impl JumpFlowMap {
    pub fn new(k: Mode, amplitude: f64, convention: SignConvention) -> Self {
        Self { sigma: sigma_field(k), amplitude, convention }
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn convention(&self) -> SignConvention {
        self.convention
    }

    pub fn sigma(&self) -> &SigmaField {
        &self.sigma
    }

    /// Image of `x`, reduced to `[0, 1)²`.
    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        let s = self.sigma.eval(x);
        let c = self.convention.sign() * self.amplitude;
        [(x[0] + c * s[0]).rem_euclid(1.0), (x[1] + c * s[1]).rem_euclid(1.0)]
    }

    pub fn inverse(&self) -> Self {
        Self { convention: self.convention.flipped(), ..*self }
    }

    /// Jacobian matrix `I ± w a_k ⊗ ∇e_k(x)`.
    pub fn jacobian(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        let k = self.sigma.mode();
        let phase = std::f64::consts::TAU * k.dot_point(x);
        let g = std::f64::consts::SQRT_2 * std::f64::consts::TAU * if k.is_plus() { -phase.sin() } else { phase.cos() };
        let grad = [g * k.k1() as f64, g * k.k2() as f64];
        let a = self.sigma.direction();
        let c = self.convention.sign() * self.amplitude;
        [[1.0 + c * a[0] * grad[0], c * a[0] * grad[1]], [c * a[1] * grad[0], 1.0 + c * a[1] * grad[1]]]
    }
}

pub fn apply_jump_flow(map: &JumpFlowMap, x: [f64; 2]) -> [f64; 2] {
    map.apply(x)
}

/// `‖e^{wA_k^n} Π_n φ − φ(· + wσ_k)‖_{L²}`, by trapezoidal quadrature on
/// `grid`.
///
/// `e^{wσ_k·∇}φ = φ(x + wσ_k(x))` in the continuum, so this measures how
/// well the Galerkin exponential reproduces the Marcus jump.
pub fn marcus_map_error(k: Mode, w: f64, phi: &SpectralField, n: u32, grid: &SpectralGrid) -> Result<f64> {
    let a = coupling_matrix(k, n);
    let galerkin = jump_exponential(&a, -w, &phi.project(n))?;
    let values = grid.synthesize(&galerkin);
    let flow = JumpFlowMap::new(k, w, SignConvention::Euler);
    let sum: f64 = grid
        .points()
        .iter()
        .zip(&values)
        .map(|(x, v)| {
            let d = v - phi.eval(flow.apply(*x));
            d * d
        })
        .sum();
    Ok((sum / values.len() as f64).sqrt())
}
