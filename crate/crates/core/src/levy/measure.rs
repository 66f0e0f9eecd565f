use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{EddyError, Result};

/// A symmetric Lévy measure supported in `[−1, 1] \ {0}`.
///
/// In configuration files:
///
/// ```toml
/// [nu]
/// kind = "discrete_atoms"
/// atoms = [[0.5, 0.5], [-0.5, 0.5]]   # [z, mass]
/// ```
///
/// or `kind = "truncated_power_law"` with `alpha` and `scale`, giving the
/// density `scale·|z|^{−1−alpha}` on `0 < |z| ≤ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LevyMeasure {
    DiscreteAtoms { atoms: Vec<[f64; 2]> },
    TruncatedPowerLaw { alpha: f64, scale: f64 },
}

/// Which jump sizes an integral over `ν` runs over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JumpRange {
    Full,
    /// `|z| < ε`
    Below(f64),
    /// `ε ≤ |z| ≤ 1`
    AtLeast(f64),
}

impl JumpRange {
    fn bounds(self) -> (f64, f64) {
        match self {
            JumpRange::Full => (0.0, 1.0),
            JumpRange::Below(eps) => (0.0, eps.clamp(0.0, 1.0)),
            JumpRange::AtLeast(eps) => (eps.clamp(0.0, 1.0), 1.0),
        }
    }

    fn contains(self, z: f64) -> bool {
        let a = z.abs();
        match self {
            JumpRange::Full => true,
            JumpRange::Below(eps) => a < eps,
            JumpRange::AtLeast(eps) => a >= eps,
        }
    }
}

const GL_DEGREE: usize = 16;

fn gauss_legendre() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(GL_DEGREE).unwrap()))
}

impl LevyMeasure {
    /// `½δ_{1/2} + ½δ_{−1/2}`.
    pub fn two_atom() -> Self {
        LevyMeasure::DiscreteAtoms { atoms: vec![[0.5, 0.5], [-0.5, 0.5]] }
    }

    pub fn power_law(alpha: f64, scale: f64) -> Result<Self> {
        let nu = LevyMeasure::TruncatedPowerLaw { alpha, scale };
        nu.validate()?;
        Ok(nu)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LevyMeasure::DiscreteAtoms { atoms } => {
                if atoms.is_empty() {
                    return Err(EddyError::invalid("nu.atoms", "at least one atom is required"));
                }
                for &[z, mass] in atoms {
                    if !(z.is_finite() && z != 0.0 && z.abs() <= 1.0) {
                        return Err(EddyError::invalid(
                            "nu.atoms",
                            format!("atom location {z} outside [-1, 1] \\ {{0}}"),
                        ));
                    }
                    if !(mass.is_finite() && mass > 0.0) {
                        return Err(EddyError::invalid("nu.atoms", format!("atom mass {mass} must be positive")));
                    }
                }
                let mut pos: Vec<(f64, f64)> = atoms.iter().filter(|a| a[0] > 0.0).map(|a| (a[0], a[1])).collect();
                let mut neg: Vec<(f64, f64)> = atoms.iter().filter(|a| a[0] < 0.0).map(|a| (-a[0], a[1])).collect();
                pos.sort_by(|a, b| a.partial_cmp(b).unwrap());
                neg.sort_by(|a, b| a.partial_cmp(b).unwrap());
                if pos != neg {
                    return Err(EddyError::AsymmetricMeasure("every atom (z, m) needs a mirror atom (-z, m)".into()));
                }
                Ok(())
            }
            &LevyMeasure::TruncatedPowerLaw { alpha, scale } => {
                if !(alpha > 0.0 && alpha < 2.0) {
                    return Err(EddyError::invalid("nu.alpha", format!("{alpha} not in (0, 2)")));
                }
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(EddyError::invalid("nu.scale", format!("{scale} must be positive")));
                }
                Ok(())
            }
        }
    }

    /// `∫ |z|^p ν(dz)` over `range`, for `p > alpha` in the power-law case.
    pub fn moment(&self, p: f64, range: JumpRange) -> f64 {
        match self {
            LevyMeasure::DiscreteAtoms { atoms } => {
                atoms.iter().filter(|a| range.contains(a[0])).map(|a| a[1] * a[0].abs().powf(p)).sum()
            }
            &LevyMeasure::TruncatedPowerLaw { alpha, scale } => {
                let (lo, hi) = range.bounds();
                if hi <= lo {
                    return 0.0;
                }
                let e = p - alpha;
                2.0 * scale * (hi.powf(e) - lo.powf(e)) / e
            }
        }
    }

    /// `μ₂ = ∫_{|z|≤1} z² ν(dz)`.
    pub fn second_moment(&self) -> f64 {
        self.moment(2.0, JumpRange::Full)
    }

    /// `∫_{|z|<ε} z² ν(dz)`, the variance per unit time of the compensated
    /// jumps that the sampler drops.
    pub fn truncation_error_bound(&self, eps: f64) -> f64 {
        if eps >= 1.0 {
            return self.second_moment();
        }
        self.moment(2.0, JumpRange::Below(eps))
    }

    /// `λ_ε = ν({ε ≤ |z| ≤ 1})`.
    pub fn intensity(&self, eps: f64) -> f64 {
        match self {
            LevyMeasure::DiscreteAtoms { .. } => self.moment(0.0, JumpRange::AtLeast(eps)),
            &LevyMeasure::TruncatedPowerLaw { alpha, scale } => {
                if eps >= 1.0 {
                    return 0.0;
                }
                2.0 * scale * (eps.powf(-alpha) - 1.0) / alpha
            }
        }
    }

    /// `E[z²]` under the normalised restriction of `ν` to `ε ≤ |z| ≤ 1`.
    pub fn conditional_second_moment(&self, eps: f64) -> f64 {
        self.moment(2.0, JumpRange::AtLeast(eps)) / self.intensity(eps)
    }

    /// `ψ(s) = ∫ (cos(sz) − 1) ν(dz)` over `range`.
    ///
    /// For the power law the integral is split at `z₀ = min(hi, 1/(2|s|))`:
    /// below `z₀` the Taylor series of the cosine is integrated term by
    /// term, above it Gauss-Legendre panels in `log z` sized so that the
    /// phase `sz` moves by at most about one radian per panel.
    pub fn psi(&self, s: f64, range: JumpRange) -> f64 {
        match self {
            LevyMeasure::DiscreteAtoms { atoms } => {
                atoms.iter().filter(|a| range.contains(a[0])).map(|a| a[1] * ((s * a[0]).cos() - 1.0)).sum()
            }
            &LevyMeasure::TruncatedPowerLaw { alpha, scale } => {
                let (lo, hi) = range.bounds();
                if hi <= lo || s == 0.0 {
                    return 0.0;
                }
                2.0 * scale * power_law_cos_integral(s.abs(), alpha, lo, hi)
            }
        }
    }

    pub(crate) fn size_sampler(&self, eps: f64) -> SizeSampler {
        match self {
            LevyMeasure::DiscreteAtoms { atoms } => {
                let kept: Vec<[f64; 2]> = atoms.iter().copied().filter(|a| a[0].abs() >= eps).collect();
                if kept.is_empty() {
                    return SizeSampler::Empty;
                }
                let index = WeightedIndex::new(kept.iter().map(|a| a[1])).expect("validated masses");
                SizeSampler::Atoms { sizes: kept.iter().map(|a| a[0]).collect(), index }
            }
            &LevyMeasure::TruncatedPowerLaw { alpha, .. } => {
                SizeSampler::PowerLaw { alpha, span: eps.powf(-alpha) - 1.0 }
            }
        }
    }
}

/// `∫_lo^hi (cos(sz) − 1) z^{−1−α} dz` for `s > 0`.
fn power_law_cos_integral(s: f64, alpha: f64, lo: f64, hi: f64) -> f64 {
    let z0 = hi.min(0.5 / s);
    let mut total = 0.0;
    if lo < z0 {
        // Σ_j (−1)^j s^{2j}/(2j)! ∫ z^{2j−1−α}
        let mut coef = 1.0;
        for j in 1..40 {
            let p = 2.0 * j as f64;
            coef *= -s * s / ((p - 1.0) * p);
            let e = p - alpha;
            let term = coef * (z0.powf(e) - lo.powf(e)) / e;
            total += term;
            if term.abs() <= 1e-18 * total.abs() {
                break;
            }
        }
    }
    let rule = gauss_legendre();
    let mut u = lo.max(z0).ln();
    let u_end = hi.ln();
    while u < u_end {
        let z = u.exp();
        let h = (1.0 / (s * z)).min(0.5).min(u_end - u);
        total += rule.integrate(u, u + h, |v| {
            let z = v.exp();
            ((s * z).cos() - 1.0) * z.powf(-alpha)
        });
        u += h;
    }
    total
}

#[derive(Debug, Clone)]
pub(crate) enum SizeSampler {
    Empty,
    Atoms { sizes: Vec<f64>, index: WeightedIndex<f64> },
    PowerLaw { alpha: f64, span: f64 },
}

impl SizeSampler {
    pub(crate) fn is_empty(&self) -> bool {
        matches!(self, SizeSampler::Empty)
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            SizeSampler::Empty => panic!("no jump sizes at or above the truncation level"),
            SizeSampler::Atoms { sizes, index } => sizes[index.sample(rng)],
            &SizeSampler::PowerLaw { alpha, span } => {
                let u: f64 = rng.random();
                let r = (1.0 + u * span).powf(-1.0 / alpha);
                if rng.random::<bool>() {
                    r
                } else {
                    -r
                }
            }
        }
    }
}
