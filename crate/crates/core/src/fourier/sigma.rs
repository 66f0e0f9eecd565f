use super::{eval_basis, Mode};

/// Divergence-free noise field `σ_k(x) = a_k e_k(x)`, with `a_k = k⊥/|k|`
/// taken from the `Z²₊` representative so that `a_k = a_{−k}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaField {
    k: Mode,
    direction: [f64; 2],
}

pub fn sigma_field(k: Mode) -> SigmaField {
    let p = k.plus_representative();
    let norm = k.norm();
    // k⊥ = (k₂, −k₁)
    SigmaField { k, direction: [p.k2() as f64 / norm, -(p.k1() as f64) / norm] }
}

impl SigmaField {
    #[inline]
    pub fn mode(&self) -> Mode {
        self.k
    }

    /// Unit vector `a_k`.
    #[inline]
    pub fn direction(&self) -> [f64; 2] {
        self.direction
    }

    #[inline]
    pub fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        let e = eval_basis(self.k, x);
        [self.direction[0] * e, self.direction[1] * e]
    }

    /// `a_k · l` through the integer cross product, so that the value is
    /// bit-identical for every `l` on a line parallel to `k`.
    #[inline]
    pub fn dot_mode(&self, l: Mode) -> f64 {
        let p = self.k.plus_representative();
        let cross = p.k2() as i64 * l.k1() as i64 - p.k1() as i64 * l.k2() as i64;
        cross as f64 / self.k.norm()
    }
}
