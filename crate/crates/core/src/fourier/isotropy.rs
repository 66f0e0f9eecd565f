use crate::error::{EddyError, Result};
use crate::levy::NoiseCoefficients;

use super::sigma_field;

/// `Σ_k θ_k² σ_k(x) ⊗ σ_k(x)` over the support of `theta`.
pub fn isotropy_sum(theta: &NoiseCoefficients, x: [f64; 2]) -> Result<[[f64; 2]; 2]> {
    if let Some(norm_sq) = theta.radial_violation() {
        return Err(EddyError::NotRadial { norm_sq });
    }
    let mut s = [[0.0; 2]; 2];
    for &(k, th) in theta.support() {
        let v = sigma_field(k).eval(x);
        let w = th * th;
        for i in 0..2 {
            for j in 0..2 {
                s[i][j] += w * v[i] * v[j];
            }
        }
    }
    Ok(s)
}
