//! Fixtures shared by the benchmarks.

use eddy_core::{Mode, SpectralField};

/// Deterministic field with every coefficient nonzero.
pub fn dense_field(cutoff: u32) -> SpectralField {
    let mut f = SpectralField::zeros(cutoff);
    for (i, c) in f.coeffs_mut().iter_mut().enumerate() {
        *c = ((i as f64 + 1.0) * 0.7548776662).fract() - 0.5;
    }
    f
}

pub fn mode(k1: i32, k2: i32) -> Mode {
    Mode::new(k1, k2).expect("nonzero mode")
}
