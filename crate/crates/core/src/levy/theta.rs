use std::collections::HashMap;

use crate::error::{EddyError, Result};
use crate::fourier::Mode;

/// Radially symmetric noise amplitudes `θ_k` with unit `ℓ²` norm.
///
/// The support is stored in basis order: by `|k|²`, then `k₁`, then `k₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseCoefficients {
    entries: Vec<(Mode, f64)>,
    index: HashMap<Mode, usize>,
}

impl NoiseCoefficients {
    /// Validates positivity, `θ_k = θ_{−k}` and `Σθ_k² = 1` (to 1e−12).
    ///
    /// Radial symmetry is not required here; see [`Self::is_radial`].
    pub fn new(mut entries: Vec<(Mode, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(EddyError::invalid("theta", "empty support"));
        }
        entries.sort_by_key(|(k, _)| (k.norm_sq(), k.k1(), k.k2()));
        let mut index = HashMap::with_capacity(entries.len());
        for (i, &(k, v)) in entries.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(EddyError::invalid("theta", format!("θ at {k} is {v}, must be positive")));
            }
            if index.insert(k, i).is_some() {
                return Err(EddyError::invalid("theta", format!("mode {k} listed twice")));
            }
        }
        for &(k, v) in &entries {
            match index.get(&k.neg()) {
                Some(&j) if entries[j].1 == v => {}
                _ => return Err(EddyError::invalid("theta", format!("θ at {k} and at {} differ", k.neg()))),
            }
        }
        let norm_sq: f64 = entries.iter().map(|(_, v)| v * v).sum();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(EddyError::invalid("theta", format!("ℓ² norm squared is {norm_sq}, expected 1")));
        }
        Ok(Self { entries, index })
    }

    pub fn support(&self) -> &[(Mode, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, k: Mode) -> Option<f64> {
        self.index.get(&k).map(|&i| self.entries[i].1)
    }

    /// Position of `k` in [`Self::support`].
    pub fn index_of(&self, k: Mode) -> Option<usize> {
        self.index.get(&k).copied()
    }

    pub fn linf(&self) -> f64 {
        self.entries.iter().map(|e| e.1).fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    /// Largest `|k|²` in the support.
    pub fn max_norm_sq(&self) -> i64 {
        self.entries.last().map(|(k, _)| k.norm_sq()).unwrap_or(0)
    }

    /// First shell `|k|²` on which θ is not constant, if any.
    pub fn radial_violation(&self) -> Option<i64> {
        self.entries
            .windows(2)
            .find(|w| w[0].0.norm_sq() == w[1].0.norm_sq() && w[0].1 != w[1].1)
            .map(|w| w[0].0.norm_sq())
    }

    pub fn is_radial(&self) -> bool {
        self.radial_violation().is_none()
    }
}

/// `θ^n_k ∝ |k|^{−a}` on `1 ≤ |k| ≤ n`, normalised in `ℓ²`.
///
/// Values depend on `k` only through the integer `|k|²`, so equal shells
/// get bit-identical coefficients.
pub fn make_theta(n: u32, a: f64) -> Result<NoiseCoefficients> {
    if n == 0 {
        return Err(EddyError::invalid("theta.n", "must be at least 1"));
    }
    if !(a > 0.0 && a < 1.0) {
        return Err(EddyError::invalid("theta.a", format!("{a} not in (0, 1)")));
    }
    let r = n as i32;
    let n_sq = (n as i64) * (n as i64);
    let mut raw = Vec::new();
    for k1 in -r..=r {
        for k2 in -r..=r {
            let Ok(k) = Mode::new(k1, k2) else { continue };
            if k.norm_sq() <= n_sq {
                raw.push((k, (k.norm_sq() as f64).powf(-0.5 * a)));
            }
        }
    }
    let norm = raw.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
    for e in &mut raw {
        e.1 /= norm;
    }
    NoiseCoefficients::new(raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: i32, b: i32) -> Mode {
        Mode::new(a, b).unwrap()
    }

    #[test]
    fn unit_shell() {
        for a in [0.1, 0.5, 0.9] {
            let th = make_theta(1, a).unwrap();
            assert_eq!(th.len(), 4);
            for &(_, v) in th.support() {
                assert_eq!(v, 0.5);
            }
        }
    }

    #[test]
    fn hypotheses_hold() {
        let mut prev = f64::INFINITY;
        for n in 1..=16 {
            let th = make_theta(n, 0.5).unwrap();
            assert!(th.is_radial());
            assert!((th.l2_norm() - 1.0).abs() < 1e-14);
            for &(k, v) in th.support() {
                assert_eq!(th.get(k.neg()), Some(v));
            }
            assert!(th.linf() < prev, "n = {n}");
            prev = th.linf();
        }
        let th = make_theta(3, 0.5).unwrap();
        assert_eq!(th.get(m(1, 0)), th.get(m(0, -1)));
        assert_eq!(th.get(m(3, 0)), th.get(m(0, 3)));
    }

    #[test]
    fn second_cutoff_example() {
        // 12 modes: 4 at |k|=1, 4 at √2, 4 at 2.
        let th = make_theta(2, 0.5).unwrap();
        assert_eq!(th.len(), 12);
        let z = 4.0 * (1.0 + 0.5f64.sqrt() + 0.5);
        let expect = 1.0 / z.sqrt();
        assert!((th.linf() - expect).abs() < 1e-15);
        assert!(th.linf() < 0.5);
    }

    #[test]
    fn rejects_invalid() {
        assert!(make_theta(3, 1.0).is_err());
        assert!(make_theta(3, 0.0).is_err());
        assert!(make_theta(0, 0.5).is_err());
        assert!(NoiseCoefficients::new(vec![(m(1, 0), 1.0)]).is_err());
        let skew =
            vec![(m(1, 0), 0.6), (m(-1, 0), 0.6), (m(0, 1), 0.2f64.sqrt() * 0.5f64.sqrt().sqrt()), (m(0, -1), 0.0)];
        assert!(NoiseCoefficients::new(skew).is_err());
    }

    #[test]
    fn non_radial_is_detected() {
        let a = 0.6f64;
        let b = (0.5 - a * a).sqrt();
        let th = NoiseCoefficients::new(vec![(m(1, 0), a), (m(-1, 0), a), (m(0, 1), b), (m(0, -1), b)]).unwrap();
        assert_eq!(th.radial_violation(), Some(1));
    }
}
