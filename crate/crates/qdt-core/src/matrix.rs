//! Dense complex-matrix kernel.
//!
//! Row-major storage, `Complex64` entries. Every structure above this module
//! (states, events, channels) is a thin semantic wrapper over [`ComplexMatrix`].
//! Deliberately dense: total dimensions stay small (hard cap
//! [`MAX_TOTAL_DIM`]), so sparsity machinery would buy nothing.

use crate::{C64, Error, Result};

/// Largest supported matrix side length.
pub const MAX_TOTAL_DIM: usize = 4096;

/// Numerical tolerances threaded through validation and comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Allowed Hermiticity defect ‖m − m†‖_F.
    pub eps_hermitian: f64,
    /// Allowed negative excursion of eigenvalues of positive operators.
    pub eps_psd: f64,
    /// General equality / orthonormality tolerance.
    pub eps_equality: f64,
}

impl Tolerance {
    pub fn new(eps_hermitian: f64, eps_psd: f64, eps_equality: f64) -> Result<Self> {
        for (name, v) in [
            ("eps_hermitian", eps_hermitian),
            ("eps_psd", eps_psd),
            ("eps_equality", eps_equality),
        ] {
            if !(v > 0.0 && v <= 1e-3) {
                return Err(Error::Invalid(format!(
                    "tolerance {name} = {v:e} outside (0, 1e-3]"
                )));
            }
        }
        Ok(Self { eps_hermitian, eps_psd, eps_equality })
    }
}

impl Default for Tolerance {
    /// Double precision on dims ≤ 64 keeps roundoff well below these.
    fn default() -> Self {
        Self { eps_hermitian: 1e-9, eps_psd: 1e-9, eps_equality: 1e-10 }
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Build from row-major entries. Rejects empty shapes, oversized
    /// dimensions, length mismatches and non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Invalid("matrix dimensions must be positive".into()));
        }
        if rows > MAX_TOTAL_DIM || cols > MAX_TOTAL_DIM {
            return Err(Error::Invalid(format!(
                "matrix dimension {}x{} exceeds supported maximum {}",
                rows, cols, MAX_TOTAL_DIM
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "entry count {} != {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Invalid("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = C64::new(v, 0.0);
        }
        m
    }

    /// Convenience constructor from rows of `(re, im)` pairs.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, factor: C64) -> Self {
        let data = self.data.iter().map(|a| a * factor).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    /// Matrix product. Parallelizes over output rows for large operands.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let row_product = |i: usize| {
            let mut row = vec![C64::new(0.0, 0.0); m];
            for l in 0..k {
                let a = self.data[i * k + l];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let other_row = &other.data[l * m..(l + 1) * m];
                for (r, b) in row.iter_mut().zip(other_row) {
                    *r += a * b;
                }
            }
            row
        };
        let data = if n * k * m >= crate::par::PAR_FLOP_THRESHOLD {
            crate::par::flat_map_rows(n, row_product)
        } else {
            let mut data = Vec::with_capacity(n * m);
            for i in 0..n {
                data.extend(row_product(i));
            }
            data
        };
        Ok(Self { rows: n, cols: m, data })
    }

    /// Conjugate transpose m†.
    pub fn adjoint(&self) -> Self {
        let mut data = vec![C64::new(0.0, 0.0); self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    pub fn trace(&self) -> C64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.data[i * self.cols + i]).sum()
    }

    /// Tr(self · other) without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "trace product of {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self.data[i * self.cols + k] * other.data[k * other.cols + i];
            }
        }
        Ok(acc)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ‖m − m†‖_F.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = self.data[i * self.cols + j] - self.data[j * self.cols + i].conj();
                acc += d.norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self, tol: &Tolerance) -> bool {
        self.is_square() && self.hermiticity_defect() <= tol.eps_hermitian
    }

    /// Largest |entry| together with its index pair.
    pub fn max_abs_entry(&self) -> (f64, usize, usize) {
        let mut best = (0.0, 0, 0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.data[i * self.cols + j].norm();
                if a > best.0 {
                    best = (a, i, j);
                }
            }
        }
        best
    }

    /// Symmetrized copy (m + m†)/2.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        let data = self
            .data
            .iter()
            .zip(&adj.data)
            .map(|(a, b)| (a + b) * 0.5)
            .collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matvec of {}x{} with length-{} vector",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.data[i * self.cols + j] * v[j])
                    .sum()
            })
            .collect())
    }

    /// Quadratic form ⟨u|m|u⟩ (real part; imaginary part is roundoff for
    /// Hermitian m).
    pub fn expectation(&self, u: &[C64]) -> Result<f64> {
        let mu = self.matvec(u)?;
        Ok(u.iter().zip(&mu).map(|(a, b)| (a.conj() * b).re).sum())
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    /// Assemble a matrix from column vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Result<Self> {
        let cols = columns.len();
        if cols == 0 {
            return Err(Error::Invalid("no columns".into()));
        }
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("ragged columns".into()));
        }
        let mut m = Self::zeros(rows, cols);
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m.data[i * cols + j] = v;
            }
        }
        Ok(m)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

/// Outer product |u⟩⟨v|.
pub fn outer(u: &[C64], v: &[C64]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(u.len(), v.len());
    for (i, &a) in u.iter().enumerate() {
        for (j, &b) in v.iter().enumerate() {
            m.set(i, j, a * b.conj());
        }
    }
    m
}

/// Kronecker product: block (i,j) of the result is `a[i,j]·b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let f = a.get(i, j);
            if f.re == 0.0 && f.im == 0.0 {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out.set(i * b.rows() + k, j * b.cols() + l, f * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Kronecker product of a vector pair.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

/// Decompose a row-major composite index into per-factor digits
/// (first factor most significant, matching `kron`).
fn decompose_index(mut idx: usize, dims: &[usize], out: &mut [usize]) {
    for f in (0..dims.len()).rev() {
        out[f] = idx % dims[f];
        idx /= dims[f];
    }
}

fn compose_index(digits: &[usize], dims: &[usize]) -> usize {
    let mut idx = 0;
    for (d, &dim) in digits.iter().zip(dims) {
        idx = idx * dim + d;
    }
    idx
}

fn check_factorization(m: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    if !m.is_square() {
        return Err(Error::FactorizationMismatch(format!(
            "matrix {}x{} is not square",
            m.rows(),
            m.cols()
        )));
    }
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::FactorizationMismatch("factor dimensions must be positive".into()));
    }
    let product: usize = dims.iter().product();
    if product != m.rows() {
        return Err(Error::FactorizationMismatch(format!(
            "factor dimensions {:?} multiply to {}, matrix side is {}",
            dims,
            product,
            m.rows()
        )));
    }
    Ok(())
}

/// Partial trace over all factors not listed in `keep`.
///
/// `dims` factorizes the square matrix as a tensor product (first factor most
/// significant, matching [`kron`]); `keep` holds the factor indices to
/// retain. Kept factors stay in their original relative order, and keeping
/// every factor returns the matrix unchanged. The keep set must be
/// non-empty: to trace out everything, declare a trivial dimension-1 factor
/// and keep that, which leaves the 1×1 matrix holding the trace.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    check_factorization(m, dims)?;
    if keep.is_empty() {
        return Err(Error::Invalid("keep set must be non-empty".into()));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::Invalid("duplicate factor index in keep set".into()));
    }
    if kept.iter().any(|&f| f >= dims.len()) {
        return Err(Error::Invalid(format!(
            "keep index out of range for {} factors",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|f| !kept.contains(f)).collect();
    if traced.is_empty() {
        return Ok(m.clone());
    }

    let kept_dims: Vec<usize> = kept.iter().map(|&f| dims[f]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&f| dims[f]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let sum_dim: usize = traced_dims.iter().product();

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    let mut row_digits = vec![0usize; kept.len()];
    let mut col_digits = vec![0usize; kept.len()];
    let mut tr_digits = vec![0usize; traced.len()];
    let mut full_row = vec![0usize; dims.len()];
    let mut full_col = vec![0usize; dims.len()];
    for r in 0..out_dim {
        decompose_index(r, &kept_dims, &mut row_digits);
        for c in 0..out_dim {
            decompose_index(c, &kept_dims, &mut col_digits);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..sum_dim {
                decompose_index(t, &traced_dims, &mut tr_digits);
                for (slot, &f) in kept.iter().enumerate() {
                    full_row[f] = row_digits[slot];
                    full_col[f] = col_digits[slot];
                }
                for (slot, &f) in traced.iter().enumerate() {
                    full_row[f] = tr_digits[slot];
                    full_col[f] = tr_digits[slot];
                }
                acc += m.get(compose_index(&full_row, dims), compose_index(&full_col, dims));
            }
            out.set(r, c, acc);
        }
    }
    Ok(out)
}

/// Inverse of disentangling: given operators on the `part` factors and on the
/// complementary factors (each in ascending factor order), assemble their
/// product operator back into the full factor ordering of `dims`.
pub fn assemble_bipartition(
    dims: &[usize],
    part: &[usize],
    on_part: &ComplexMatrix,
    on_rest: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let mut part_sorted: Vec<usize> = part.to_vec();
    part_sorted.sort_unstable();
    part_sorted.dedup();
    if part_sorted.len() != part.len() || part_sorted.iter().any(|&f| f >= dims.len()) {
        return Err(Error::Invalid("invalid partition index set".into()));
    }
    let rest: Vec<usize> = (0..dims.len()).filter(|f| !part_sorted.contains(f)).collect();
    let part_dims: Vec<usize> = part_sorted.iter().map(|&f| dims[f]).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&f| dims[f]).collect();
    let dp: usize = part_dims.iter().product();
    let dr: usize = rest_dims.iter().product();
    if on_part.rows() != dp || !on_part.is_square() {
        return Err(Error::FactorizationMismatch(format!(
            "partition operator is {}x{}, expected {dp}x{dp}",
            on_part.rows(),
            on_part.cols()
        )));
    }
    if on_rest.rows() != dr || !on_rest.is_square() {
        return Err(Error::FactorizationMismatch(format!(
            "complement operator is {}x{}, expected {dr}x{dr}",
            on_rest.rows(),
            on_rest.cols()
        )));
    }

    let total: usize = dims.iter().product();
    let mut out = ComplexMatrix::zeros(total, total);
    let mut row_full = vec![0usize; dims.len()];
    let mut col_full = vec![0usize; dims.len()];
    let mut row_part = vec![0usize; part_sorted.len()];
    let mut col_part = vec![0usize; part_sorted.len()];
    let mut row_rest = vec![0usize; rest.len()];
    let mut col_rest = vec![0usize; rest.len()];
    for r in 0..total {
        decompose_index(r, dims, &mut row_full);
        for (slot, &f) in part_sorted.iter().enumerate() {
            row_part[slot] = row_full[f];
        }
        for (slot, &f) in rest.iter().enumerate() {
            row_rest[slot] = row_full[f];
        }
        let rp = compose_index(&row_part, &part_dims);
        let rr = compose_index(&row_rest, &rest_dims);
        for c in 0..total {
            decompose_index(c, dims, &mut col_full);
            for (slot, &f) in part_sorted.iter().enumerate() {
                col_part[slot] = col_full[f];
            }
            for (slot, &f) in rest.iter().enumerate() {
                col_rest[slot] = col_full[f];
            }
            let cp = compose_index(&col_part, &part_dims);
            let cr = compose_index(&col_rest, &rest_dims);
            out.set(r, c, on_part.get(rp, cp) * on_rest.get(rr, cr));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Direct four-index expansion, independent of `kron`'s loop layout.
    fn kron_oracle(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
        for i in 0..out.rows() {
            for j in 0..out.cols() {
                let v = a.get(i / b.rows(), j / b.cols()) * b.get(i % b.rows(), j % b.cols());
                out.set(i, j, v);
            }
        }
        out
    }

    #[test]
    fn kron_identity_blocks() {
        let out = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3));
        assert_eq!(out, ComplexMatrix::identity(6));
    }

    #[test]
    fn kron_diagonal() {
        let out = kron(
            &ComplexMatrix::diagonal(&[1.0, 2.0]),
            &ComplexMatrix::diagonal(&[3.0, 4.0]),
        );
        assert_eq!(out, ComplexMatrix::diagonal(&[3.0, 4.0, 6.0, 8.0]));
    }

    #[test]
    fn kron_trace_multiplicativity() {
        let mut rng = crate::random::Prng::new(11);
        for _ in 0..20 {
            let a = crate::random::complex_matrix(&mut rng, 2, 2);
            let b = crate::random::complex_matrix(&mut rng, 2, 2);
            let k = kron(&a, &b);
            assert_eq!(k, kron_oracle(&a, &b));
            let lhs = k.trace();
            let rhs = a.trace() * b.trace();
            assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn kron_associative_for_integer_entries() {
        let a = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(0.0, 3.0), c(4.0, 0.0)]])
            .unwrap();
        let b = ComplexMatrix::diagonal(&[2.0, 5.0]);
        let d = ComplexMatrix::from_rows(&[vec![c(0.0, 1.0), c(1.0, 0.0)], vec![c(7.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        assert_eq!(kron(&kron(&a, &b), &d), kron(&a, &kron(&b, &d)));
    }

    #[test]
    fn partial_trace_of_product_state() {
        let mut rng = crate::random::Prng::new(3);
        let a = crate::random::hermitian(&mut rng, 2);
        let b = crate::random::hermitian(&mut rng, 3);
        let full = kron(&a, &b);
        let reduced = partial_trace(&full, &[2, 3], &[0]).unwrap();
        let expected = a.scale(b.trace());
        assert!(reduced.sub(&expected).unwrap().frobenius_norm() < 1e-12);
        let reduced_b = partial_trace(&full, &[2, 3], &[1]).unwrap();
        let expected_b = b.scale(a.trace());
        assert!(reduced_b.sub(&expected_b).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let mut rng = crate::random::Prng::new(4);
        let m = crate::random::hermitian(&mut rng, 12);
        let reduced = partial_trace(&m, &[2, 3, 2], &[1]).unwrap();
        assert!((reduced.trace() - m.trace()).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_bell_state() {
        // (|00⟩+|11⟩)(⟨00|+⟨11|)/2 reduces to identity/2 on either side
        let mut bell = ComplexMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            bell.set(i, j, c(0.5, 0.0));
        }
        for keep in [0usize, 1] {
            let reduced = partial_trace(&bell, &[2, 2], &[keep]).unwrap();
            let expected = ComplexMatrix::identity(2).scale(c(0.5, 0.0));
            assert!(reduced.sub(&expected).unwrap().frobenius_norm() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_factorization() {
        let m = ComplexMatrix::identity(6);
        let err = partial_trace(&m, &[2, 2], &[0]).unwrap_err();
        assert!(err.to_string().contains("factorization mismatch"));
    }

    #[test]
    fn partial_trace_over_everything_is_the_trace() {
        // tracing out all factors: keep a trivial dimension-1 factor
        let mut rng = crate::random::Prng::new(16);
        let m = crate::random::hermitian(&mut rng, 5);
        let out = partial_trace(&m, &[1, 5], &[0]).unwrap();
        assert_eq!((out.rows(), out.cols()), (1, 1));
        assert!((out.get(0, 0) - m.trace()).norm() < 1e-13);
    }

    #[test]
    fn assemble_bipartition_roundtrip() {
        let mut rng = crate::random::Prng::new(9);
        let a = crate::random::hermitian(&mut rng, 2);
        let b = crate::random::hermitian(&mut rng, 3);
        let m = crate::random::hermitian(&mut rng, 2);
        // build a ⊗ b ⊗ m, then reassemble from the (0,2) | (1) cut
        let full = kron(&kron(&a, &b), &m);
        let on_am = partial_trace(&full, &[2, 3, 2], &[0, 2]).unwrap();
        let on_b = partial_trace(&full, &[2, 3, 2], &[1]).unwrap();
        let assembled = assemble_bipartition(&[2, 3, 2], &[0, 2], &on_am, &on_b).unwrap();
        // traces redistribute: on_am = tr(b)·(a⊗m), on_b = tr(a)tr(m)·b
        let expected = full.scale(a.trace() * b.trace() * m.trace());
        assert!(assembled.sub(&expected).unwrap().frobenius_norm() < 1e-10);
    }

    #[test]
    fn adjoint_and_trace_product() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(3.0, -1.0)],
            vec![c(0.0, 1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        let adj = m.adjoint();
        assert_eq!(adj.get(0, 1), c(0.0, -1.0));
        assert_eq!(adj.get(1, 0), c(3.0, 1.0));
        let prod = m.mul(&adj).unwrap();
        let direct = m.trace_product(&adj).unwrap();
        assert!((prod.trace() - direct).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_finite() {
        let err = ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).unwrap_err();
        assert!(err.to_string().contains("non-finite"));
    }
}
