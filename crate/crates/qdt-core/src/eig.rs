//! Hermitian eigendecomposition and range bases.
//!
//! Cyclic Jacobi with complex rotations: each sweep annihilates every
//! off-diagonal pair through a phase rotation (making the pivot real)
//! followed by a real Jacobi rotation. Quadratically convergent, highly
//! accurate on the small dense operators this crate works with, and fully
//! deterministic, which golden tests rely on.

use crate::matrix::{outer, ComplexMatrix, Tolerance};
use crate::{C64, Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix: real eigenvalues in ascending
/// order, matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    /// Rebuild VΛV† (diagnostic; tests use it as the reconstruction oracle).
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let col = v.column(k);
            out = out
                .add(&outer(&col, &col).scale(C64::new(lambda, 0.0)))
                .expect("shape");
        }
        out
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Rejects inputs whose Hermiticity defect exceeds `tol.eps_hermitian`; the
/// computation itself runs on the symmetrized part, so eps-level asymmetry
/// cannot leak into the spectrum. Eigenvalues come back ascending; each
/// eigenvector is phase-fixed so its first significant component is real
/// positive, making the output deterministic.
pub fn eig_hermitian(m: &ComplexMatrix, tol: &Tolerance) -> Result<HermitianEig> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let defect = m.hermiticity_defect();
    if defect > tol.eps_hermitian {
        return Err(Error::NotHermitian { defect, tolerance: tol.eps_hermitian });
    }

    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);
    let target = 1e-15 * scale;

    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a.get(i, j).norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= target {
            return Ok(finalize(a, v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    Err(Error::Numerical(format!(
        "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps (dim {n})"
    )))
}

/// One complex Jacobi rotation annihilating a[p,q].
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let abs_apq = apq.norm();
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    if abs_apq <= f64::EPSILON * 1e-2 * (app.abs() + aqq.abs()).max(f64::MIN_POSITIVE) {
        a.set(p, q, C64::new(0.0, 0.0));
        a.set(q, p, C64::new(0.0, 0.0));
        return;
    }

    // phase e^{iφ} of the pivot; diag(1, e^{-iφ}) makes it real
    let phase = apq / abs_apq;
    let tau = (aqq - app) / (2.0 * abs_apq);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // block unitary U = diag(1, e^{-iφ}) on (p,q) composed with the real
    // rotation [[c, s], [-s, c]]
    let upp = C64::new(c, 0.0);
    let upq = C64::new(s, 0.0);
    let uqp = phase.conj() * (-s);
    let uqq = phase.conj() * c;

    let n = a.rows();
    // columns: A ← A·U
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * upp + akq * uqp);
        a.set(k, q, akp * upq + akq * uqq);
    }
    // rows: A ← U†·A
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, upp.conj() * apk + uqp.conj() * aqk);
        a.set(q, k, upq.conj() * apk + uqq.conj() * aqk);
    }
    // accumulate eigenvectors: V ← V·U
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * upp + vkq * uqp);
        v.set(k, q, vkp * upq + vkq * uqq);
    }

    a.set(p, q, C64::new(0.0, 0.0));
    a.set(q, p, C64::new(0.0, 0.0));
    let dpp = a.get(p, p);
    let dqq = a.get(q, q);
    a.set(p, p, C64::new(dpp.re, 0.0));
    a.set(q, q, C64::new(dqq.re, 0.0));
}

fn finalize(a: ComplexMatrix, v: ComplexMatrix) -> HermitianEig {
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    let lambdas: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| lambdas[i].partial_cmp(&lambdas[j]).expect("finite eigenvalues"));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut columns = Vec::with_capacity(n);
    for &idx in &order {
        eigenvalues.push(lambdas[idx]);
        columns.push(phase_fix(v.column(idx)));
    }
    let eigenvectors = ComplexMatrix::from_columns(n, &columns).expect("shape");
    HermitianEig { eigenvalues, eigenvectors }
}

/// Rotate a unit column's global phase so its first significant component is
/// real positive.
fn phase_fix(mut col: Vec<C64>) -> Vec<C64> {
    if let Some(k) = col.iter().position(|z| z.norm() > 1e-8) {
        let mag = col[k].norm();
        let phase = col[k].conj() / mag;
        for z in col.iter_mut() {
            *z *= phase;
        }
        col[k] = C64::new(mag, 0.0);
    }
    col
}

/// Orthonormal basis of the column space of `m`, dominant direction first.
/// Singular directions with σ ≤ eps_equality·σ_max are dropped; the zero
/// matrix yields an empty basis.
///
/// Hermitian inputs (the lattice operations only ever pass those) go through
/// their own eigendecomposition, which resolves σ down to roundoff. Anything
/// else falls back to the Gram matrix m·m†, whose squaring raises the noise
/// floor to ~√ε·σ_max, so the cutoff is floored there.
pub fn range_basis(m: &ComplexMatrix, tol: &Tolerance) -> Result<Vec<Vec<C64>>> {
    if m.is_square() && m.hermiticity_defect() <= tol.eps_hermitian {
        let eig = eig_hermitian(m, tol)?;
        let sigma_max = eig.eigenvalues.iter().fold(0.0_f64, |acc, &l| acc.max(l.abs()));
        if sigma_max == 0.0 {
            return Ok(Vec::new());
        }
        let cutoff = tol.eps_equality * sigma_max;
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&i, &j| {
            eig.eigenvalues[j]
                .abs()
                .partial_cmp(&eig.eigenvalues[i].abs())
                .expect("finite eigenvalues")
        });
        return Ok(order
            .into_iter()
            .filter(|&k| eig.eigenvalues[k].abs() > cutoff)
            .map(|k| eig.eigenvectors.column(k))
            .collect());
    }

    let gram = m.mul(&m.adjoint())?;
    let eig = eig_hermitian(&gram, tol)?;
    let sigma_max = eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    if sigma_max == 0.0 {
        return Ok(Vec::new());
    }
    let noise_floor = (gram.rows() as f64).sqrt() * f64::EPSILON.sqrt();
    let cutoff = tol.eps_equality.max(noise_floor) * sigma_max;
    let mut basis = Vec::new();
    for k in (0..eig.eigenvalues.len()).rev() {
        let sigma = eig.eigenvalues[k].max(0.0).sqrt();
        if sigma > cutoff {
            basis.push(eig.eigenvectors.column(k));
        }
    }
    Ok(basis)
}

/// Projector onto the span of an orthonormal column set.
pub fn projector_onto(basis: &[Vec<C64>], dim: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(dim, dim);
    for col in basis {
        p = p.add(&outer(col, col)).expect("shape");
    }
    p
}
