//! Mode-coupling operators `A_k^n = Π_n(σ_k·∇ ·)` on `H_n`.
//!
//! Entries come from product-to-sum identities: `σ_k·∇e_q` only has
//! components on `e_{±(q+k)}` and `e_{±(q−k)}`, with weight `∓√2π (a_k·q)`.
//! Only the strictly upper triangle is stored; the lower triangle is its
//! negative, so antisymmetry is exact.
//!
//! Because `a_k·(q + jk) = a_k·q`, the operator splits into independent
//! blocks, one per family of lattice lines parallel to `k`. Each block is
//! diagonalised once (as the Hermitian matrix `iA`), which makes
//! `exp(wA)` and any even spectral function of `A` cheap to apply.

use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::Result;

use super::{shifted_cosine, sigma_field, Basis, Mode, SigmaField, SpectralField};

#[derive(Debug)]
pub struct ModeCouplingOperator {
    k: Mode,
    basis: Arc<Basis>,
    sigma: SigmaField,
    upper: Vec<(u32, u32, f64)>,
    blocks: Vec<CouplingBlock>,
    spectra: OnceLock<Vec<BlockSpectrum>>,
}

/// An invariant subspace of `A_k^n` together with the restricted matrix.
#[derive(Debug, Clone)]
pub struct CouplingBlock {
    pub indices: Vec<usize>,
    pub matrix: DMatrix<f64>,
}

/// Eigen-decomposition `iA_b = U diag(λ) U*` of one block.
#[derive(Debug, Clone)]
pub struct BlockSpectrum {
    pub eigenvalues: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

/// Column `q` of `σ_k·∇` in the real basis, restricted to `basis`.
///
/// Returns `(row, value)` pairs; used for assembly and as a check on the
/// stored triangle.
pub(crate) fn column_entries(sigma: &SigmaField, basis: &Basis, q: Mode) -> Vec<(usize, f64)> {
    let k = sigma.mode();
    let a_dot_q = sigma.dot_mode(q);
    if a_dot_q == 0.0 {
        return Vec::new();
    }
    let coef = -SQRT_2 * PI * a_dot_q;
    let phase = |m: Mode| if m.is_plus() { 0 } else { 1 };
    let (pq, pk) = (phase(q), phase(k));
    let mut out = Vec::with_capacity(4);
    let terms = [(q.checked_add(k), pq + pk + 1), (q.checked_sub(k), pq - pk + 1)];
    for (m, quarter_turns) in terms {
        let Some(m) = m else { continue };
        let (p, c_plus, c_minus) = shifted_cosine(m, quarter_turns);
        for (row_mode, v) in [(p, c_plus), (p.neg(), c_minus)] {
            if v == 0.0 {
                continue;
            }
            if let Some(i) = basis.index_of(row_mode) {
                out.push((i, coef * v));
            }
        }
    }
    out
}

/// Assembles `A_k^n`.
pub fn coupling_matrix(k: Mode, cutoff: u32) -> ModeCouplingOperator {
    let basis = Basis::new(cutoff);
    let sigma = sigma_field(k);
    let mut upper = Vec::new();
    let n_sq = (cutoff as i64) * (cutoff as i64);
    if k.norm_sq() <= 4 * n_sq {
        for (j, &q) in basis.modes().iter().enumerate() {
            for (i, v) in column_entries(&sigma, &basis, q) {
                if i < j {
                    upper.push((i as u32, j as u32, v));
                }
            }
        }
    }
    let blocks = build_blocks(basis.len(), &upper);
    ModeCouplingOperator { k, basis, sigma, upper, blocks, spectra: OnceLock::new() }
}

fn build_blocks(dim: usize, upper: &[(u32, u32, f64)]) -> Vec<CouplingBlock> {
    let mut parent: Vec<usize> = (0..dim).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(i, j, _) in upper {
        let (ri, rj) = (find(&mut parent, i as usize), find(&mut parent, j as usize));
        if ri != rj {
            parent[ri.max(rj)] = ri.min(rj);
        }
    }
    let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut touched = vec![false; dim];
    for &(i, j, _) in upper {
        touched[i as usize] = true;
        touched[j as usize] = true;
    }
    for (x, _) in touched.iter().enumerate().filter(|(_, t)| **t) {
        let r = find(&mut parent, x);
        members.entry(r).or_default().push(x);
    }
    let mut roots: Vec<usize> = members.keys().copied().collect();
    roots.sort_unstable();
    let mut local = vec![usize::MAX; dim];
    let mut blocks: Vec<CouplingBlock> = roots
        .into_iter()
        .map(|r| {
            let indices = members.remove(&r).unwrap();
            for (li, &gi) in indices.iter().enumerate() {
                local[gi] = li;
            }
            let size = indices.len();
            CouplingBlock { indices, matrix: DMatrix::zeros(size, size) }
        })
        .collect();
    let mut block_of = vec![usize::MAX; dim];
    for (b, block) in blocks.iter().enumerate() {
        for &gi in &block.indices {
            block_of[gi] = b;
        }
    }
    for &(i, j, v) in upper {
        let b = block_of[i as usize];
        let (li, lj) = (local[i as usize], local[j as usize]);
        blocks[b].matrix[(li, lj)] = v;
        blocks[b].matrix[(lj, li)] = -v;
    }
    blocks
}

impl ModeCouplingOperator {
    #[inline]
    pub fn mode(&self) -> Mode {
        self.k
    }

    #[inline]
    pub fn cutoff(&self) -> u32 {
        self.basis.cutoff()
    }

    #[inline]
    pub fn sigma(&self) -> &SigmaField {
        &self.sigma
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Strictly upper-triangular entries `(row, col, A[row][col])`.
    pub fn upper_entries(&self) -> &[(u32, u32, f64)] {
        &self.upper
    }

    pub fn blocks(&self) -> &[CouplingBlock] {
        &self.blocks
    }

    pub fn is_zero(&self) -> bool {
        self.upper.is_empty()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut a = DMatrix::zeros(n, n);
        for &(i, j, v) in &self.upper {
            a[(i as usize, j as usize)] = v;
            a[(j as usize, i as usize)] = -v;
        }
        a
    }

    /// `A f`.
    pub fn apply(&self, f: &SpectralField) -> Result<SpectralField> {
        self.check(f)?;
        let mut out = SpectralField::zeros(self.cutoff());
        let (x, y) = (f.coeffs(), out.coeffs_mut());
        for &(i, j, v) in &self.upper {
            let (i, j) = (i as usize, j as usize);
            y[i] += v * x[j];
            y[j] -= v * x[i];
        }
        Ok(out)
    }

    pub(crate) fn check(&self, f: &SpectralField) -> Result<()> {
        if f.cutoff() != self.cutoff() {
            return Err(crate::EddyError::CutoffMismatch { expected: self.cutoff(), found: f.cutoff() });
        }
        Ok(())
    }

    /// Per-block spectra of `iA`, computed on first use.
    pub fn spectra(&self) -> &[BlockSpectrum] {
        self.spectra.get_or_init(|| {
            self.blocks
                .iter()
                .map(|b| {
                    let h = b.matrix.map(|v| Complex64::new(0.0, v));
                    let eig = SymmetricEigen::new(h);
                    BlockSpectrum { eigenvalues: eig.eigenvalues.iter().copied().collect(), vectors: eig.eigenvectors }
                })
                .collect()
        })
    }

    /// Applies `g(iA)` for a spectral multiplier `g`, returning the real part.
    ///
    /// Components outside every block lie in the kernel of `A`; they are
    /// multiplied by `g(0)`.
    pub fn apply_spectral(&self, f: &SpectralField, g: impl Fn(f64) -> Complex64) -> Result<SpectralField> {
        self.check(f)?;
        let g0 = g(0.0).re;
        let mut out = f.scaled(g0);
        let x = f.coeffs();
        let y = out.coeffs_mut();
        let mut proj = Vec::new();
        for (block, spec) in self.blocks.iter().zip(self.spectra()) {
            let size = block.indices.len();
            let u = &spec.vectors;
            proj.clear();
            for c in 0..size {
                let mut acc = Complex64::new(0.0, 0.0);
                for (r, &gi) in block.indices.iter().enumerate() {
                    acc += u[(r, c)].conj() * x[gi];
                }
                proj.push(acc * g(spec.eigenvalues[c]));
            }
            for (r, &gi) in block.indices.iter().enumerate() {
                let mut acc = 0.0;
                for (c, p) in proj.iter().enumerate() {
                    let uv = u[(r, c)];
                    acc += uv.re * p.re - uv.im * p.im;
                }
                y[gi] = acc;
            }
        }
        Ok(out)
    }
}

/// Lazily built coupling operators `A_k^n` for one cutoff, shared across
/// threads.
#[derive(Debug)]
pub struct CouplingFamily {
    cutoff: u32,
    ops: Mutex<HashMap<Mode, Arc<ModeCouplingOperator>>>,
}

impl CouplingFamily {
    pub fn new(cutoff: u32) -> Self {
        Self { cutoff, ops: Mutex::new(HashMap::new()) }
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    /// `A_k^n`, with its block spectra already computed.
    pub fn get(&self, k: Mode) -> Arc<ModeCouplingOperator> {
        if let Some(op) = self.ops.lock().expect("coupling cache poisoned").get(&k) {
            return op.clone();
        }
        let op = Arc::new(coupling_matrix(k, self.cutoff));
        op.spectra();
        self.ops.lock().expect("coupling cache poisoned").entry(k).or_insert(op).clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::SpectralGrid;
    use crate::rng::seeded;
    use rand::Rng;
    use std::f64::consts::TAU;

    fn m(a: i32, b: i32) -> Mode {
        Mode::new(a, b).unwrap()
    }

    fn random_field(cutoff: u32, seed: u64) -> SpectralField {
        let mut rng = seeded(seed);
        let len = Basis::new(cutoff).len();
        SpectralField::from_coeffs(cutoff, (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
    }

    #[test]
    fn full_formula_is_antisymmetric_bitwise() {
        for (k, n) in [(m(1, 0), 4), (m(2, -1), 5), (m(-3, 2), 6), (m(0, -4), 3)] {
            let basis = Basis::new(n);
            let sigma = sigma_field(k);
            let mut full = DMatrix::<f64>::zeros(basis.len(), basis.len());
            for (j, &q) in basis.modes().iter().enumerate() {
                for (i, v) in column_entries(&sigma, &basis, q) {
                    full[(i, j)] += v;
                }
            }
            assert_eq!(full, -full.transpose(), "k = {k}");
            assert_eq!(full, coupling_matrix(k, n).to_dense());
        }
    }

    #[test]
    fn matches_pseudo_spectral_product() {
        // σ_k·∇f evaluated on a grid fine enough to resolve |l| + |k|.
        let n = 6;
        let grid = SpectralGrid::new(40);
        for (seed, k) in [m(1, 0), m(1, 2), m(-2, 3), m(0, -5), m(7, 1)].into_iter().enumerate() {
            let f = random_field(n, seed as u64);
            let sigma = sigma_field(k);
            let (d1, d2) = (grid.synthesize(&f.derivative(0)), grid.synthesize(&f.derivative(1)));
            let pts = grid.points();
            let prod: Vec<f64> = pts
                .iter()
                .enumerate()
                .map(|(p, x)| {
                    let s = sigma.eval(*x);
                    s[0] * d1[p] + s[1] * d2[p]
                })
                .collect();
            let oracle = grid.analyze(&prod, n);
            let a = coupling_matrix(k, n).apply(&f).unwrap();
            let err = a.sub(&oracle).unwrap().norm();
            assert!(err < 1e-11, "k = {k}: {err}");
        }
    }

    #[test]
    fn example_norm_two_pi() {
        for n in [2, 3, 8] {
            let a = coupling_matrix(m(1, 0), n);
            let out = a.apply(&SpectralField::basis_function(m(0, 1), n)).unwrap();
            assert!((out.norm() - TAU).abs() < 1e-13, "n = {n}: {}", out.norm());
        }
    }

    #[test]
    fn vanishes_beyond_twice_cutoff() {
        for n in [1u32, 2, 5] {
            let k = m(2 * n as i32 + 1, 0);
            let a = coupling_matrix(k, n);
            assert!(a.is_zero());
            assert!(a.blocks().is_empty());
        }
        assert!(coupling_matrix(m(4, 0), 2).is_zero());
        assert!(!coupling_matrix(m(2, 1), 2).is_zero());
    }

    #[test]
    fn quadratic_form_vanishes() {
        for seed in 0..20u64 {
            let mut rng = seeded(100 + seed);
            let k = m(rng.random_range(-6..=6), rng.random_range(1..=6));
            let f = random_field(5, seed);
            let af = coupling_matrix(k, 5).apply(&f).unwrap();
            assert!(af.dot(&f).abs() < 1e-12);
        }
    }

    #[test]
    fn blocks_reassemble_the_operator() {
        let a = coupling_matrix(m(1, 2), 6);
        let mut dense = DMatrix::<f64>::zeros(a.dim(), a.dim());
        for b in a.blocks() {
            for (r, &gi) in b.indices.iter().enumerate() {
                for (c, &gj) in b.indices.iter().enumerate() {
                    dense[(gi, gj)] = b.matrix[(r, c)];
                }
            }
        }
        assert_eq!(dense, a.to_dense());
    }

    #[test]
    fn spectral_identity_reproduces_input_and_operator() {
        let a = coupling_matrix(m(-1, 1), 5);
        let f = random_field(5, 9);
        let same = a.apply_spectral(&f, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(same.sub(&f).unwrap().norm() < 1e-13);
        // A = −i·(iA): multiplier −iλ reproduces A f.
        let af = a.apply_spectral(&f, |l| Complex64::new(0.0, -l)).unwrap();
        assert!(af.sub(&a.apply(&f).unwrap()).unwrap().norm() < 1e-11);
    }
}
