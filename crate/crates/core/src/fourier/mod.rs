//! Real trigonometric basis on the torus `T² = [0,1)²` and the linear
//! operators built on it.
//!
//! The basis is `e_l(x) = √2 cos(2π l·x)` for `l ∈ Z²₊` and
//! `e_l(x) = √2 sin(2π l·x)` for `l ∈ Z²₋`, orthonormal in `L²(T²)`.
//! A spectral field at cutoff `n` stores one real coefficient per mode
//! `0 < |l| ≤ n`.

mod basis;
mod biot_savart;
mod coupling;
mod grid;
mod isotropy;
mod mode;
mod sigma;

pub use basis::{eval_basis, Basis, SpectralField};
pub use biot_savart::{biot_savart, curl, divergence, Velocity};
pub use coupling::{coupling_matrix, BlockSpectrum, CouplingBlock, CouplingFamily, ModeCouplingOperator};
pub use grid::SpectralGrid;
pub use isotropy::isotropy_sum;
pub use mode::{Mode, Partition};
pub use sigma::{sigma_field, SigmaField};

/// Expansion of `√2 cos(2π m·x − r·π/2)` in the real basis.
///
/// Returns `(p, c_plus, c_minus)` such that the function equals
/// `c_plus·e_p + c_minus·e_{−p}` where `p` is the `Z²₊` representative of
/// `±m`. The coefficients are exactly `0` or `±1`.
pub(crate) fn shifted_cosine(m: Mode, quarter_turns: i32) -> (Mode, f64, f64) {
    let (cos_r, sin_r) = match quarter_turns.rem_euclid(4) {
        0 => (1.0, 0.0),
        1 => (0.0, 1.0),
        2 => (-1.0, 0.0),
        _ => (0.0, -1.0),
    };
    let p = m.plus_representative();
    let s = if m.partition() == Partition::Plus { 1.0 } else { -1.0 };
    (p, cos_r, -s * sin_r)
}
