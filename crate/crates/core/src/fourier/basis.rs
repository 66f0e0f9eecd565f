use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2, TAU};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{EddyError, Result};

use super::Mode;

/// `e_l(x)`: `√2 cos(2π l·x)` on `Z²₊`, `√2 sin(2π l·x)` on `Z²₋`.
pub fn eval_basis(l: Mode, x: [f64; 2]) -> f64 {
    let phase = TAU * l.dot_point(x);
    if l.is_plus() {
        SQRT_2 * phase.cos()
    } else {
        SQRT_2 * phase.sin()
    }
}

/// The ordered mode set `{l : 0 < |l| ≤ n}` of the Galerkin space `H_n`.
///
/// Modes are sorted by `(|l|², l₁, l₂)`, so the basis at a smaller cutoff
/// is always a prefix of the basis at a larger one.
#[derive(Debug)]
pub struct Basis {
    cutoff: u32,
    modes: Vec<Mode>,
    lookup: Vec<u32>,
    neg: Vec<usize>,
}

const ABSENT: u32 = u32::MAX;

impl Basis {
    /// Shared basis for cutoff `n`; constructed once per process.
    pub fn new(cutoff: u32) -> Arc<Basis> {
        static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Basis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().expect("basis cache poisoned");
        guard.entry(cutoff).or_insert_with(|| Arc::new(Basis::build(cutoff))).clone()
    }

    fn build(cutoff: u32) -> Basis {
        let n = cutoff as i32;
        let n_sq = (cutoff as i64) * (cutoff as i64);
        let mut modes = Vec::new();
        for k1 in -n..=n {
            for k2 in -n..=n {
                if let Ok(m) = Mode::new(k1, k2) {
                    if m.norm_sq() <= n_sq {
                        modes.push(m);
                    }
                }
            }
        }
        modes.sort_by_key(|m| (m.norm_sq(), m.k1(), m.k2()));
        let side = (2 * cutoff + 1) as usize;
        let mut lookup = vec![ABSENT; side * side];
        for (i, m) in modes.iter().enumerate() {
            lookup[Self::slot(cutoff, *m)] = i as u32;
        }
        let mut basis = Basis { cutoff, modes, lookup, neg: Vec::new() };
        basis.neg = basis.modes.iter().map(|m| basis.index_of(m.neg()).expect("basis closed under negation")).collect();
        basis
    }

    #[inline]
    fn slot(cutoff: u32, m: Mode) -> usize {
        let side = (2 * cutoff + 1) as i64;
        let c = cutoff as i64;
        ((m.k1() as i64 + c) * side + (m.k2() as i64 + c)) as usize
    }

    #[inline]
    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    #[inline]
    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    #[inline]
    pub fn mode(&self, i: usize) -> Mode {
        self.modes[i]
    }

    /// Index of `−mode(i)`.
    #[inline]
    pub fn neg_index(&self, i: usize) -> usize {
        self.neg[i]
    }

    #[inline]
    pub fn index_of(&self, m: Mode) -> Option<usize> {
        let c = self.cutoff as i32;
        if m.k1().abs() > c || m.k2().abs() > c {
            return None;
        }
        match self.lookup[Self::slot(self.cutoff, m)] {
            ABSENT => None,
            i => Some(i as usize),
        }
    }

    /// Number of modes with `|l| ≤ m`, i.e. the prefix length for cutoff `m`.
    pub fn prefix_len(&self, m: u32) -> usize {
        let m_sq = (m as i64) * (m as i64);
        self.modes.partition_point(|l| l.norm_sq() <= m_sq)
    }
}

/// A real mean-zero function on `T²` in `H_n`.
#[derive(Clone, Debug)]
pub struct SpectralField {
    basis: Arc<Basis>,
    coeffs: Vec<f64>,
}

impl PartialEq for SpectralField {
    fn eq(&self, other: &Self) -> bool {
        self.cutoff() == other.cutoff() && self.coeffs == other.coeffs
    }
}

impl SpectralField {
    pub fn zeros(cutoff: u32) -> Self {
        let basis = Basis::new(cutoff);
        let coeffs = vec![0.0; basis.len()];
        Self { basis, coeffs }
    }

    pub fn from_coeffs(cutoff: u32, coeffs: Vec<f64>) -> Result<Self> {
        let basis = Basis::new(cutoff);
        if coeffs.len() != basis.len() {
            return Err(EddyError::invalid(
                "coeffs",
                format!("expected {} coefficients for cutoff {cutoff}, got {}", basis.len(), coeffs.len()),
            ));
        }
        Ok(Self { basis, coeffs })
    }

    /// Builds `Σ c_l e_l`; modes beyond the cutoff are an error.
    pub fn from_modes(cutoff: u32, terms: &[(Mode, f64)]) -> Result<Self> {
        let mut f = Self::zeros(cutoff);
        for &(m, c) in terms {
            let i = f
                .basis
                .index_of(m)
                .ok_or_else(|| EddyError::invalid("terms", format!("mode {m} exceeds cutoff {cutoff}")))?;
            f.coeffs[i] += c;
        }
        Ok(f)
    }

    /// `Π_n e_l`, which is zero when `|l| > n`.
    pub fn basis_function(l: Mode, cutoff: u32) -> Self {
        let mut f = Self::zeros(cutoff);
        if let Some(i) = f.basis.index_of(l) {
            f.coeffs[i] = 1.0;
        }
        f
    }

    #[inline]
    pub fn cutoff(&self) -> u32 {
        self.basis.cutoff()
    }

    #[inline]
    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    #[inline]
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Coefficient of `e_l`; zero outside the basis.
    pub fn coeff(&self, l: Mode) -> f64 {
        self.basis.index_of(l).map_or(0.0, |i| self.coeffs[i])
    }

    pub fn dot(&self, other: &SpectralField) -> f64 {
        // Inner product is well-defined across cutoffs thanks to the prefix ordering.
        let len = self.coeffs.len().min(other.coeffs.len());
        self.coeffs[..len].iter().zip(&other.coeffs[..len]).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// `L²` norm, equal to the Euclidean norm of the coefficients.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        self.basis
            .modes()
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| **c != 0.0)
            .map(|(m, c)| c * eval_basis(*m, x))
            .sum()
    }

    /// Orthogonal projection `Π_n` (truncation or zero-padding).
    pub fn project(&self, cutoff: u32) -> SpectralField {
        let mut out = SpectralField::zeros(cutoff);
        let len = out.coeffs.len().min(self.coeffs.len());
        out.coeffs[..len].copy_from_slice(&self.coeffs[..len]);
        out
    }

    pub fn scaled(&self, s: f64) -> SpectralField {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    /// `self += a·other` (same cutoff).
    pub fn axpy(&mut self, a: f64, other: &SpectralField) -> Result<()> {
        self.check_cutoff(other)?;
        for (y, x) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *y += a * x;
        }
        Ok(())
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    pub(crate) fn check_cutoff(&self, other: &SpectralField) -> Result<()> {
        if self.cutoff() != other.cutoff() {
            return Err(EddyError::CutoffMismatch { expected: self.cutoff(), found: other.cutoff() });
        }
        Ok(())
    }

    /// Partial derivative `∂_j` (`axis ∈ {0, 1}`); uses `∂_j e_l = 2π l_j e_{−l}`.
    pub fn derivative(&self, axis: usize) -> SpectralField {
        let mut out = SpectralField::zeros(self.cutoff());
        for (i, m) in self.basis.modes().iter().enumerate() {
            let lj = m.as_array()[axis] as f64;
            out.coeffs[self.basis.neg_index(i)] = TAU * lj * self.coeffs[i];
        }
        out
    }

    /// `Δf`; `e_l` has eigenvalue `−4π²|l|²`.
    pub fn laplacian(&self) -> SpectralField {
        let mut out = self.clone();
        for (c, m) in out.coeffs.iter_mut().zip(self.basis.modes()) {
            *c *= -4.0 * PI * PI * m.norm_sq() as f64;
        }
        out
    }

    /// Multiplies each coefficient by `g(l)`.
    pub fn map_modes(&self, g: impl Fn(Mode) -> f64) -> SpectralField {
        let mut out = self.clone();
        for (c, m) in out.coeffs.iter_mut().zip(self.basis.modes()) {
            *c *= g(*m);
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}
