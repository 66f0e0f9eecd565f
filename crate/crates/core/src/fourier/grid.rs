//! Uniform `N×N` grid on the torus with FFT-based synthesis and analysis.

use std::f64::consts::SQRT_2;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlannerScalar};

use super::{Basis, SpectralField};

/// Grid values are stored row-major: index `i1·N + i2` holds the value at
/// `x = (i1/N, i2/N)`.
///
/// The scalar planner is used so that results do not depend on the SIMD
/// features of the host.
#[derive(Clone)]
pub struct SpectralGrid {
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid").field("size", &self.size).finish()
    }
}

impl SpectralGrid {
    pub fn new(size: usize) -> Self {
        assert!(size >= 2, "grid size must be at least 2");
        let mut planner = FftPlannerScalar::new();
        Self { size, forward: planner.plan_fft_forward(size), inverse: planner.plan_fft_inverse(size) }
    }

    /// Smallest 5-smooth size that resolves quadratic products of fields
    /// with the given cutoff without aliasing (`N ≥ 3n + 1`).
    pub fn dealiased_size(cutoff: u32) -> usize {
        let mut n = 3 * cutoff as usize + 1;
        loop {
            let mut r = n;
            for p in [2, 3, 5] {
                while r % p == 0 {
                    r /= p;
                }
            }
            if r == 1 {
                return n;
            }
            n += 1;
        }
    }

    pub fn for_products(cutoff: u32) -> Self {
        Self::new(Self::dealiased_size(cutoff))
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn points(&self) -> Vec<[f64; 2]> {
        let n = self.size;
        let h = 1.0 / n as f64;
        (0..n * n).map(|p| [(p / n) as f64 * h, (p % n) as f64 * h]).collect()
    }

    fn wrap(&self, k: i32) -> usize {
        k.rem_euclid(self.size as i32) as usize
    }

    fn transform(&self, buf: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.size;
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(buf, &mut scratch);
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for i2 in 0..n {
            for i1 in 0..n {
                col[i1] = buf[i1 * n + i2];
            }
            fft.process_with_scratch(&mut col, &mut scratch);
            for i1 in 0..n {
                buf[i1 * n + i2] = col[i1];
            }
        }
    }

    /// Point values of `f` on the grid.
    pub fn synthesize(&self, f: &SpectralField) -> Vec<f64> {
        let n = self.size;
        assert!(n > 2 * f.cutoff() as usize, "grid too coarse for cutoff {}", f.cutoff());
        let mut buf = vec![Complex64::new(0.0, 0.0); n * n];
        let basis = f.basis();
        let c = f.coeffs();
        for (i, &p) in basis.modes().iter().enumerate() {
            if !p.is_plus() {
                continue;
            }
            let hat = Complex64::new(c[i], c[basis.neg_index(i)]) / SQRT_2;
            buf[self.wrap(p.k1()) * n + self.wrap(p.k2())] = hat;
            buf[self.wrap(-p.k1()) * n + self.wrap(-p.k2())] = hat.conj();
        }
        self.transform(&mut buf, &self.inverse);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Galerkin projection onto `H_cutoff` of grid values, computed by the
    /// discrete Fourier transform.
    pub fn analyze(&self, values: &[f64], cutoff: u32) -> SpectralField {
        let n = self.size;
        assert_eq!(values.len(), n * n, "grid value count");
        assert!(n > 2 * cutoff as usize, "grid too coarse for cutoff {cutoff}");
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, &self.forward);
        let scale = SQRT_2 / (n * n) as f64;
        let basis = Basis::new(cutoff);
        let mut out = SpectralField::zeros(cutoff);
        let coeffs = out.coeffs_mut();
        for (i, &p) in basis.modes().iter().enumerate() {
            if !p.is_plus() {
                continue;
            }
            let hat = buf[self.wrap(p.k1()) * n + self.wrap(p.k2())];
            coeffs[i] = scale * hat.re;
            coeffs[basis.neg_index(i)] = scale * hat.im;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::Mode;

    #[test]
    fn dealiased_sizes_are_smooth_and_large_enough() {
        assert_eq!(SpectralGrid::dealiased_size(1), 4);
        assert_eq!(SpectralGrid::dealiased_size(4), 15);
        assert_eq!(SpectralGrid::dealiased_size(6), 20);
        for n in 1..40 {
            assert!(SpectralGrid::dealiased_size(n) > 3 * n as usize);
        }
    }

    #[test]
    fn product_of_two_modes_is_exact() {
        // 2 cos(a)cos(b) = cos(a+b) + cos(a−b), in the normalised basis.
        let n = 4;
        let g = SpectralGrid::for_products(n);
        let f = SpectralField::basis_function(Mode::new(2, 1).unwrap(), n);
        let h = SpectralField::basis_function(Mode::new(1, -1).unwrap(), n);
        let (vf, vh) = (g.synthesize(&f), g.synthesize(&h));
        let prod: Vec<f64> = vf.iter().zip(&vh).map(|(a, b)| a * b).collect();
        let out = g.analyze(&prod, n);
        let expect = SpectralField::from_modes(
            n,
            &[(Mode::new(3, 0).unwrap(), SQRT_2 / 2.0), (Mode::new(1, 2).unwrap(), SQRT_2 / 2.0)],
        )
        .unwrap();
        assert!(out.sub(&expect).unwrap().norm() < 1e-14);
    }
}
