//! Seeded sampling for property suites and default pipeline inputs.
//!
//! A tiny splitmix64 stream keeps every draw reproducible byte-for-byte from
//! a single integer seed, with no global state. Ensembles follow the usual
//! conventions: Ginibre matrices for generic draws, GG†/Tr GG† for densities,
//! QR-orthonormalized Ginibre for unitaries.

use crate::matrix::{outer, ComplexMatrix};
use crate::{C64, Error, Result};

/// splitmix64 generator; passes through u64 state, cheap to fork.
#[derive(Debug, Clone)]
pub struct Prng {
    state: u64,
}

impl Prng {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Independent substream for a tagged task; stable under reordering of
    /// sibling tasks, which keeps parallel sweeps deterministic.
    pub fn fork(&self, tag: u64) -> Self {
        let mut forked = Self { state: self.state ^ tag.wrapping_mul(0x9E3779B97F4A7C15) };
        forked.next_u64();
        forked
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1].
    fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller.
    pub fn gaussian(&mut self) -> f64 {
        let u = self.uniform_open();
        let v = self.uniform();
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    }

    /// Standard complex Gaussian (independent real/imaginary parts).
    pub fn complex_gaussian(&mut self) -> C64 {
        C64::new(self.gaussian(), self.gaussian())
    }

    /// Uniform integer in [0, bound).
    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }
}

/// Ginibre matrix: independent standard complex Gaussian entries.
pub fn complex_matrix(rng: &mut Prng, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| rng.complex_gaussian()).collect();
    ComplexMatrix::new(rows, cols, data).expect("gaussian entries are finite")
}

/// Random Hermitian matrix (G + G†)/2.
pub fn hermitian(rng: &mut Prng, n: usize) -> ComplexMatrix {
    complex_matrix(rng, n, n).hermitian_part()
}

/// Random density matrix GG†/Tr(GG†): Hermitian, PSD, unit trace.
pub fn density_matrix(rng: &mut Prng, n: usize) -> ComplexMatrix {
    let g = complex_matrix(rng, n, n);
    let gg = g.mul(&g.adjoint()).expect("square product");
    let trace = gg.trace().re;
    gg.scale(C64::new(1.0 / trace, 0.0))
}

/// Random normalized state vector.
pub fn state_vector(rng: &mut Prng, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| rng.complex_gaussian()).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Haar-like random unitary: QR of a Ginibre matrix via repeated
/// Gram-Schmidt, columns phase-fixed by the R diagonal.
pub fn unitary(rng: &mut Prng, n: usize) -> ComplexMatrix {
    let g = complex_matrix(rng, n, n);
    let cols: Vec<Vec<C64>> = (0..n).map(|j| g.column(j)).collect();
    let ortho = orthonormalize(&cols, 0.0).expect("Ginibre is full rank almost surely");
    assert_eq!(ortho.len(), n, "rank-deficient Ginibre draw");
    ComplexMatrix::from_columns(n, &ortho).expect("shape")
}

/// Random rank-r projector: span of r random orthonormal columns.
pub fn projector(rng: &mut Prng, n: usize, rank: usize) -> ComplexMatrix {
    assert!(rank >= 1 && rank <= n);
    let u = unitary(rng, n);
    let mut p = ComplexMatrix::zeros(n, n);
    for j in 0..rank {
        let col = u.column(j);
        p = p.add(&outer(&col, &col)).expect("shape");
    }
    p.hermitian_part()
}

/// Modified Gram-Schmidt with re-orthogonalization. Vectors whose residual
/// norm falls at or below `drop_tol` are dropped; returns the orthonormal set.
pub(crate) fn orthonormalize(vectors: &[Vec<C64>], drop_tol: f64) -> Result<Vec<Vec<C64>>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let overlap: C64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= overlap * bi;
                }
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > drop_tol && norm > 0.0 {
            if !norm.is_finite() {
                return Err(Error::Numerical("non-finite norm in orthonormalization".into()));
            }
            basis.push(w.into_iter().map(|z| z / norm).collect());
        }
    }
    Ok(basis)
}
