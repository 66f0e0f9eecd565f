//! Marcus jumps, pointwise and on the Galerkin space, plus the nonlocal
//! corrector operator.

mod corrector;
mod expm;
mod flow;

pub use corrector::{corrector_operator, corrector_operator_in, corrector_vs_laplacian, CorrectorOperator};
pub use expm::expm;
pub use flow::{apply_jump_flow, marcus_map_error, JumpFlowMap, SignConvention};

use crate::error::Result;
use crate::fourier::{ModeCouplingOperator, SpectralField};
use num_complex::Complex64;

/// `e^{−wA} f`, evaluated blockwise through the spectrum of `iA`.
pub fn jump_exponential(a: &ModeCouplingOperator, w: f64, f: &SpectralField) -> Result<SpectralField> {
    if w == 0.0 || a.is_zero() {
        a.check(f)?;
        return Ok(f.clone());
    }
    a.apply_spectral(f, |lambda| Complex64::from_polar(1.0, w * lambda))
}

/// `y = M x` with a fixed summation order.
pub(crate) fn matvec(m: &nalgebra::DMatrix<f64>, x: &[f64], y: &mut [f64]) {
    let rows = m.nrows();
    y.iter_mut().for_each(|v| *v = 0.0);
    for (c, &xc) in x.iter().enumerate() {
        if xc == 0.0 {
            continue;
        }
        let col = &m.as_slice()[c * rows..(c + 1) * rows];
        for (yr, &mrc) in y.iter_mut().zip(col) {
            *yr += mrc * xc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{coupling_matrix, Basis, Mode};
    use crate::rng::seeded;
    use nalgebra::DVector;
    use rand::Rng;

    fn random_field(cutoff: u32, rng: &mut impl Rng) -> SpectralField {
        let len = Basis::new(cutoff).len();
        SpectralField::from_coeffs(cutoff, (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
    }

    #[test]
    fn agrees_with_pade() {
        let mut rng = seeded(3);
        for (k, w) in [((1, 0), 0.3), ((2, -1), -0.8), ((1, 3), 2.5)] {
            let a = coupling_matrix(Mode::new(k.0, k.1).unwrap(), 6);
            let f = random_field(6, &mut rng);
            let got = jump_exponential(&a, w, &f).unwrap();
            let e = expm(&(a.to_dense() * -w));
            let want = e * DVector::from_column_slice(f.coeffs());
            let err = got.coeffs().iter().zip(want.iter()).map(|(g, w)| (g - w).powi(2)).sum::<f64>().sqrt();
            assert!(err < 1e-12 * f.norm(), "k {k:?}: {err}");
        }
    }

    #[test]
    fn norm_preserved_and_inverse() {
        let mut rng = seeded(4);
        for _ in 0..1000 {
            let k = Mode::new(rng.random_range(-8..=8), rng.random_range(1..=8)).unwrap();
            let w = rng.random_range(-1.0..1.0);
            let a = coupling_matrix(k, 4);
            let f = random_field(4, &mut rng);
            let g = jump_exponential(&a, w, &f).unwrap();
            assert!((g.norm() - f.norm()).abs() < 1e-13 * f.norm());
            let back = jump_exponential(&a, -w, &g).unwrap();
            assert!(back.sub(&f).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn zero_amplitude_and_cutoff_mismatch() {
        let a = coupling_matrix(Mode::new(1, 1).unwrap(), 3);
        let f = random_field(3, &mut seeded(5));
        assert_eq!(jump_exponential(&a, 0.0, &f).unwrap(), f);
        let g = random_field(4, &mut seeded(5));
        assert!(matches!(
            jump_exponential(&a, 0.2, &g),
            Err(crate::EddyError::CutoffMismatch { expected: 3, found: 4 })
        ));
    }

    #[test]
    fn solves_the_linear_ode() {
        // RK4 on dΦ/dt = −wAΦ with a fine step as an independent oracle.
        let a = coupling_matrix(Mode::new(1, -2).unwrap(), 5);
        let f = random_field(5, &mut seeded(6));
        let w = 0.7;
        let rhs = |x: &SpectralField| a.apply(x).unwrap().scaled(-w);
        let steps = 20_000;
        let h = 1.0 / steps as f64;
        let mut x = f.clone();
        for _ in 0..steps {
            let k1 = rhs(&x);
            let mut t = x.clone();
            t.axpy(0.5 * h, &k1).unwrap();
            let k2 = rhs(&t);
            let mut t = x.clone();
            t.axpy(0.5 * h, &k2).unwrap();
            let k3 = rhs(&t);
            let mut t = x.clone();
            t.axpy(h, &k3).unwrap();
            let k4 = rhs(&t);
            x.axpy(h / 6.0, &k1).unwrap();
            x.axpy(h / 3.0, &k2).unwrap();
            x.axpy(h / 3.0, &k3).unwrap();
            x.axpy(h / 6.0, &k4).unwrap();
        }
        let got = jump_exponential(&a, w, &f).unwrap();
        let err = got.sub(&x).unwrap().norm();
        assert!(err < 1e-9, "{err}");
    }
}
