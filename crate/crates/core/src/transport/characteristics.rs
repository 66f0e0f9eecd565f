use crate::error::{EddyError, Result};
use crate::levy::{check_events, JumpEvent, NoiseCoefficients};
use crate::marcus::{JumpFlowMap, SignConvention};

/// Quadrature nodes of a uniform `m×m` grid pushed through the jump flows.
#[derive(Debug, Clone)]
pub struct ParticleCloud {
    points: Vec<[f64; 2]>,
    weight: f64,
}

impl ParticleCloud {
    pub fn uniform(m: usize) -> Self {
        let h = 1.0 / m as f64;
        Self {
            points: (0..m * m).map(|p| [(p / m) as f64 * h, (p % m) as f64 * h]).collect(),
            weight: 1.0 / (m * m) as f64,
        }
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    /// Equal weight of every node; the weights sum to 1.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn push(&mut self, map: &JumpFlowMap) {
        for x in &mut self.points {
            *x = map.apply(*x);
        }
    }

    /// `Σ_i w_i a_i φ(x_i)`.
    pub fn pair(&self, initial: &[f64], phi: impl Fn([f64; 2]) -> f64) -> f64 {
        self.points.iter().zip(initial).map(|(x, a)| a * phi(*x)).sum::<f64>() * self.weight
    }
}

/// `⟨ξ(t), φ⟩ = ∫ ξ₀(y) φ(X_t(y)) dy`, where `X_t` composes the transport
/// jump maps of all events up to `t`, the earliest applied first.
///
/// Uses a uniform `m×m` grid. Assumes no drift between jumps, i.e. that
/// `events` carries every jump of the noise.
pub fn transport_characteristics(
    xi0: impl Fn([f64; 2]) -> f64,
    events: &[JumpEvent],
    theta: &NoiseCoefficients,
    phi: impl Fn([f64; 2]) -> f64,
    t: f64,
    m: usize,
) -> Result<f64> {
    if m == 0 {
        return Err(EddyError::invalid("grid", "must be positive"));
    }
    check_events(events, theta)?;
    let mut cloud = ParticleCloud::uniform(m);
    let initial: Vec<f64> = cloud.points().iter().map(|&y| xi0(y)).collect();
    for e in events.iter().take_while(|e| e.time <= t) {
        let w = e.size * theta.get(e.mode).expect("checked");
        cloud.push(&JumpFlowMap::new(e.mode, w, SignConvention::Transport));
    }
    Ok(cloud.pair(&initial, phi))
}
