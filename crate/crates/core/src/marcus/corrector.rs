use std::sync::OnceLock;

use nalgebra::{DMatrix, Dyn, SymmetricEigen};

use crate::error::{EddyError, Result};
use crate::fourier::{Basis, CouplingFamily, SpectralField};
use crate::levy::{JumpRange, LevyMeasure, NoiseCoefficients};

use super::matvec;

/// `B = Σ_k ∫ (e^{−zθ_kA_k} − I + zθ_kA_k) ν(dz)` on `H_n`.
///
/// For symmetric `ν` the odd part integrates to zero and each summand is
/// `ψ(θ_k·iA_k)` with `ψ(s) = ∫ (cos(sz) − 1) ν(dz) ≤ 0`, so `B` is
/// symmetric negative semidefinite.
#[derive(Debug)]
pub struct CorrectorOperator {
    cutoff: u32,
    matrix: DMatrix<f64>,
    eigen: OnceLock<SymmetricEigen<f64, Dyn>>,
}

impl Clone for CorrectorOperator {
    fn clone(&self) -> Self {
        Self::from_matrix(self.cutoff, self.matrix.clone()).expect("shape already checked")
    }
}

/// Corrector over the full jump range `|z| ≤ 1`.
pub fn corrector_operator(theta: &NoiseCoefficients, nu: &LevyMeasure, n: u32) -> Result<CorrectorOperator> {
    corrector_operator_in(theta, nu, &CouplingFamily::new(n), JumpRange::Full)
}

/// Corrector restricted to the jump sizes in `range`, reusing the coupling
/// operators cached in `family`.
pub fn corrector_operator_in(
    theta: &NoiseCoefficients,
    nu: &LevyMeasure,
    family: &CouplingFamily,
    range: JumpRange,
) -> Result<CorrectorOperator> {
    nu.validate()?;
    let n = family.cutoff();
    let dim = Basis::new(n).len();
    let mut b = DMatrix::<f64>::zeros(dim, dim);
    let mut weights = Vec::new();
    for &(k, th) in theta.support() {
        let op = family.get(k);
        for (block, spec) in op.blocks().iter().zip(op.spectra()) {
            weights.clear();
            weights.extend(spec.eigenvalues.iter().map(|&l| nu.psi(th * l, range)));
            let u = &spec.vectors;
            let size = block.indices.len();
            for c in 0..size {
                for r in c..size {
                    let mut acc = 0.0;
                    for (j, &wj) in weights.iter().enumerate() {
                        let (ur, uc) = (u[(r, j)], u[(c, j)]);
                        acc += wj * (ur.re * uc.re + ur.im * uc.im);
                    }
                    let (gr, gc) = (block.indices[r], block.indices[c]);
                    b[(gr, gc)] += acc;
                    if r != c {
                        b[(gc, gr)] += acc;
                    }
                }
            }
        }
    }
    CorrectorOperator::from_matrix(n, b)
}

impl CorrectorOperator {
    pub fn from_matrix(cutoff: u32, matrix: DMatrix<f64>) -> Result<Self> {
        let dim = Basis::new(cutoff).len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(EddyError::invalid(
                "corrector",
                format!("matrix is {}x{}, H_{cutoff} has dimension {dim}", matrix.nrows(), matrix.ncols()),
            ));
        }
        Ok(Self { cutoff, matrix, eigen: OnceLock::new() })
    }

    pub fn zero(cutoff: u32) -> Self {
        let dim = Basis::new(cutoff).len();
        Self::from_matrix(cutoff, DMatrix::zeros(dim, dim)).unwrap()
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|&v| v == 0.0)
    }

    fn check(&self, f: &SpectralField) -> Result<()> {
        if f.cutoff() != self.cutoff {
            return Err(EddyError::CutoffMismatch { expected: self.cutoff, found: f.cutoff() });
        }
        Ok(())
    }

    pub fn apply(&self, f: &SpectralField) -> Result<SpectralField> {
        self.check(f)?;
        let mut out = SpectralField::zeros(self.cutoff);
        matvec(&self.matrix, f.coeffs(), out.coeffs_mut());
        Ok(out)
    }

    /// Spectral decomposition of the symmetric part, computed on first use.
    pub fn eigen(&self) -> &SymmetricEigen<f64, Dyn> {
        self.eigen.get_or_init(|| {
            let sym = (&self.matrix + self.matrix.transpose()) * 0.5;
            SymmetricEigen::new(sym)
        })
    }

    pub fn max_symmetric_eigenvalue(&self) -> f64 {
        self.eigen().eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Spectral norm of the symmetric part.
    pub fn norm(&self) -> f64 {
        self.eigen().eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// `e^{tB} f`.
    pub fn exp_apply(&self, t: f64, f: &SpectralField) -> Result<SpectralField> {
        self.check(f)?;
        if t == 0.0 || self.is_zero() {
            return Ok(f.clone());
        }
        let eig = self.eigen();
        let q = &eig.eigenvectors;
        let dim = f.coeffs().len();
        let mut y = vec![0.0; dim];
        for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
            let col = &q.as_slice()[j * dim..(j + 1) * dim];
            let p: f64 = col.iter().zip(f.coeffs()).map(|(a, b)| a * b).sum();
            let s = p * (lambda * t).exp();
            for (yr, &qr) in y.iter_mut().zip(col) {
                *yr += s * qr;
            }
        }
        SpectralField::from_coeffs(self.cutoff, y)
    }
}

/// `‖B φ − κΔφ‖_{L²}`.
pub fn corrector_vs_laplacian(b: &CorrectorOperator, kappa: f64, testfn: &SpectralField) -> Result<f64> {
    let mut r = b.apply(testfn)?;
    r.axpy(-kappa, &testfn.laplacian())?;
    Ok(r.norm())
}
