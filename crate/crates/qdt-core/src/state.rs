//! Hilbert spaces, state vectors, density operators, unitary evolution.

use crate::eig::eig_hermitian;
use crate::matrix::{outer, ComplexMatrix, Tolerance};
use crate::{C64, Error, Result};

/// Finite-dimensional space of event modes, with one outcome label per basis
/// vector.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertSpace {
    dimension: usize,
    labels: Vec<String>,
}

impl HilbertSpace {
    /// Space with default labels "0", "1", ….
    pub fn new(dimension: usize) -> Result<Self> {
        Self::with_labels((0..dimension).map(|i| i.to_string()).collect())
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Invalid("space dimension must be positive".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if !labels.iter().all(|l| seen.insert(l.clone())) {
            return Err(Error::Invalid("outcome labels must be unique".into()));
        }
        Ok(Self { dimension: labels.len(), labels })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Tensor-product space; labels combine pairwise.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut labels = Vec::with_capacity(self.dimension * other.dimension);
        for a in &self.labels {
            for b in &other.labels {
                labels.push(format!("{a}*{b}"));
            }
        }
        Self::with_labels(labels)
    }

    pub(crate) fn check_matches(&self, other: &Self) -> Result<()> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch(format!(
                "spaces of dimension {} and {}",
                self.dimension, other.dimension
            )));
        }
        Ok(())
    }
}

/// Normalized complex amplitude vector over a space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: HilbertSpace,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(space: HilbertSpace, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != space.dimension() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes on a dimension-{} space",
                amplitudes.len(),
                space.dimension()
            )));
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > Tolerance::default().eps_equality {
            return Err(Error::NormViolation(format!(
                "state vector has squared norm {norm_sq:.12}"
            )));
        }
        Ok(Self { space, amplitudes })
    }

    /// Basis vector |index⟩.
    pub fn basis(space: HilbertSpace, index: usize) -> Result<Self> {
        if index >= space.dimension() {
            return Err(Error::Invalid(format!(
                "basis index {index} out of range for dimension {}",
                space.dimension()
            )));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); space.dimension()];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { space, amplitudes })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// |ψ⟩⊗|φ⟩ on the tensor-product space.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let space = self.space.tensor(&other.space)?;
        let amplitudes = crate::matrix::kron_vec(&self.amplitudes, &other.amplitudes);
        Ok(Self { space, amplitudes })
    }
}

/// Statistical operator ρ̂: Hermitian, positive semidefinite, unit trace.
/// Decision makers are open systems, so their strategic state is always one
/// of these rather than a bare wave function.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    space: HilbertSpace,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Strict constructor: rejects any violation beyond tolerance.
    pub fn new(space: HilbertSpace, matrix: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        let candidate = Self::unchecked(space, matrix)?;
        let report = candidate.validate(tol)?;
        if !report.passes() {
            return Err(Error::InvalidDensity(report.describe()));
        }
        Ok(candidate)
    }

    /// Lenient constructor for deserialized input: clips eigenvalues in
    /// [−eps_psd, 0) to zero and renormalizes the trace, so serialization
    /// rounding does not reject otherwise valid states. Violations beyond
    /// eps_psd still fail.
    pub fn from_matrix_clipped(
        space: HilbertSpace,
        matrix: ComplexMatrix,
        tol: &Tolerance,
    ) -> Result<Self> {
        let candidate = Self::unchecked(space.clone(), matrix)?;
        let report = candidate.validate(tol)?;
        if report.passes() {
            return Ok(candidate);
        }
        if report.hermiticity_defect > tol.eps_hermitian {
            return Err(Error::InvalidDensity(report.describe()));
        }
        if report.min_eigenvalue < -tol.eps_psd {
            return Err(Error::InvalidDensity(report.describe()));
        }
        // rebuild from the clipped spectrum, then renormalize
        let eig = eig_hermitian(&candidate.matrix, tol)?;
        let n = space.dimension();
        let mut rebuilt = ComplexMatrix::zeros(n, n);
        let mut trace = 0.0;
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            let clipped = lambda.max(0.0);
            if clipped > 0.0 {
                let col = eig.eigenvectors.column(k);
                rebuilt = rebuilt.add(&outer(&col, &col).scale(C64::new(clipped, 0.0)))?;
                trace += clipped;
            }
        }
        if trace <= tol.eps_equality {
            return Err(Error::InvalidDensity("state has vanishing trace after clipping".into()));
        }
        let rebuilt = rebuilt.scale(C64::new(1.0 / trace, 0.0));
        Self::new(space, rebuilt, tol)
    }

    /// Maximally mixed state 1/d.
    pub fn maximally_mixed(space: HilbertSpace) -> Self {
        let d = space.dimension();
        let matrix = ComplexMatrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0));
        Self { space, matrix }
    }

    /// Seeded random density GG†/Tr GG†.
    pub fn random(space: HilbertSpace, rng: &mut crate::random::Prng) -> Self {
        let matrix = crate::random::density_matrix(rng, space.dimension());
        Self { space, matrix }
    }

    pub(crate) fn unchecked(space: HilbertSpace, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != space.dimension() || !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on a dimension-{} space",
                matrix.rows(),
                matrix.cols(),
                space.dimension()
            )));
        }
        Ok(Self { space, matrix })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Hermiticity defect, minimum eigenvalue and trace defect in one report.
    pub fn validate(&self, tol: &Tolerance) -> Result<ValidationReport> {
        let hermiticity_defect = self.matrix.hermiticity_defect();
        let min_eigenvalue = if hermiticity_defect <= tol.eps_hermitian {
            eig_hermitian(&self.matrix, tol)?.min_eigenvalue()
        } else {
            // spectrum of the symmetrized part still informs the report
            eig_hermitian(&self.matrix.hermitian_part(), tol)?.min_eigenvalue()
        };
        Ok(ValidationReport {
            hermiticity_defect,
            min_eigenvalue,
            trace_defect: (self.matrix.trace().re - 1.0).abs(),
            tol: *tol,
        })
    }

    /// ρ ⊗ σ on the tensor-product space.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            space: self.space.tensor(&other.space)?,
            matrix: crate::matrix::kron(&self.matrix, &other.matrix),
        })
    }
}

/// Validation summary for a density operator.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub trace_defect: f64,
    tol: Tolerance,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.hermiticity_defect <= self.tol.eps_hermitian
            && self.min_eigenvalue >= -self.tol.eps_psd
            && self.trace_defect <= 1e-8
    }

    pub fn describe(&self) -> String {
        format!(
            "hermiticity defect {:.3e}, min eigenvalue {:.3e}, trace defect {:.3e}",
            self.hermiticity_defect, self.min_eigenvalue, self.trace_defect
        )
    }
}

/// Evolution operator Û with U†U = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    space: HilbertSpace,
    matrix: ComplexMatrix,
}

impl UnitaryOperator {
    pub fn new(space: HilbertSpace, matrix: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        if matrix.rows() != space.dimension() || !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on a dimension-{} space",
                matrix.rows(),
                matrix.cols(),
                space.dimension()
            )));
        }
        let defect = matrix
            .adjoint()
            .mul(&matrix)?
            .sub(&ComplexMatrix::identity(space.dimension()))?
            .frobenius_norm();
        if defect > tol.eps_equality {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self { space, matrix })
    }

    pub fn identity(space: HilbertSpace) -> Self {
        let matrix = ComplexMatrix::identity(space.dimension());
        Self { space, matrix }
    }

    pub fn random(space: HilbertSpace, rng: &mut crate::random::Prng) -> Self {
        let matrix = crate::random::unitary(rng, space.dimension());
        Self { space, matrix }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Rank-one density |ψ⟩⟨ψ| from a normalized state vector.
pub fn pure_density(psi: &StateVector) -> DensityOperator {
    let matrix = outer(psi.amplitudes(), psi.amplitudes());
    DensityOperator { space: psi.space().clone(), matrix }
}

/// Unitary evolution UρU†; preserves trace and spectrum.
pub fn evolve(rho: &DensityOperator, u: &UnitaryOperator) -> Result<DensityOperator> {
    rho.space().check_matches(u.space())?;
    let matrix = u.matrix().mul(rho.matrix())?.mul(&u.matrix().adjoint())?;
    Ok(DensityOperator { space: rho.space().clone(), matrix })
}

/// Decoherence in a basis: zero every off-diagonal element of ρ expressed in
/// the given orthonormal basis, keep the diagonal.
pub fn dephase(rho: &DensityOperator, basis: &ComplexMatrix, tol: &Tolerance) -> Result<DensityOperator> {
    let d = rho.space().dimension();
    if basis.rows() != d || basis.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "basis {}x{} on a dimension-{d} space",
            basis.rows(),
            basis.cols()
        )));
    }
    let defect = basis
        .adjoint()
        .mul(basis)?
        .sub(&ComplexMatrix::identity(d))?
        .frobenius_norm();
    if defect > tol.eps_equality {
        return Err(Error::NotOrthonormal(defect));
    }
    // ρ' = Σ_k |v_k⟩⟨v_k| ρ |v_k⟩⟨v_k|
    let in_basis = basis.adjoint().mul(rho.matrix())?.mul(basis)?;
    let mut diag = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        diag.set(k, k, C64::new(in_basis.get(k, k).re, 0.0));
    }
    let matrix = basis.mul(&diag)?.mul(&basis.adjoint())?;
    Ok(DensityOperator { space: rho.space().clone(), matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Prng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn qubit() -> HilbertSpace {
        HilbertSpace::new(2).unwrap()
    }

    #[test]
    fn pure_density_basis_state() {
        let psi = StateVector::basis(qubit(), 0).unwrap();
        let rho = pure_density(&psi);
        assert_eq!(rho.matrix().get(0, 0), c(1.0, 0.0));
        assert_eq!(rho.matrix().get(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn pure_density_uniform_superposition() {
        let inv = 1.0 / 2.0_f64.sqrt();
        let psi = StateVector::new(qubit(), vec![c(inv, 0.0), c(inv, 0.0)]).unwrap();
        let rho = pure_density(&psi);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert!((rho.matrix().get(i, j) - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn pure_density_outer_product_oracle() {
        let psi = StateVector::new(qubit(), vec![c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
        let rho = pure_density(&psi);
        // entrywise b_α b*_β
        for i in 0..2 {
            for j in 0..2 {
                let expected = psi.amplitudes()[i] * psi.amplitudes()[j].conj();
                assert!((rho.matrix().get(i, j) - expected).norm() < 1e-15);
            }
        }
        // rank one, idempotent
        let p2 = rho.matrix().mul(rho.matrix()).unwrap();
        assert!(p2.sub(rho.matrix()).unwrap().frobenius_norm() < 1e-14);
    }

    #[test]
    fn unnormalized_vector_rejected() {
        let err = StateVector::new(qubit(), vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap_err();
        assert!(err.to_string().contains("norm violation"));
    }

    #[test]
    fn validate_passes_maximally_mixed() {
        let rho = DensityOperator::maximally_mixed(qubit());
        assert!(rho.validate(&Tolerance::default()).unwrap().passes());
    }

    #[test]
    fn validate_rejects_bad_trace() {
        let m = ComplexMatrix::diagonal(&[1.0, 0.5]);
        let rho = DensityOperator::unchecked(qubit(), m).unwrap();
        let report = rho.validate(&Tolerance::default()).unwrap();
        assert!(!report.passes());
        assert!((report.trace_defect - 0.5).abs() < 1e-15);
    }

    #[test]
    fn validate_rejects_negative_eigenvalue() {
        // 2x2 formula oracle: eigenvalues 0.5 ± 0.6
        let m = ComplexMatrix::from_rows(&[vec![c(0.5, 0.0), c(0.6, 0.0)], vec![c(0.6, 0.0), c(0.5, 0.0)]])
            .unwrap();
        let rho = DensityOperator::unchecked(qubit(), m).unwrap();
        let report = rho.validate(&Tolerance::default()).unwrap();
        assert!(!report.passes());
        assert!((report.min_eigenvalue - (-0.1)).abs() < 1e-12);
    }

    #[test]
    fn clipped_constructor_repairs_rounding() {
        // tiny negative eigenvalue within eps_psd
        let m = ComplexMatrix::diagonal(&[1.0 + 5e-10, -5e-10]);
        let rho = DensityOperator::from_matrix_clipped(qubit(), m, &Tolerance::default()).unwrap();
        let report = rho.validate(&Tolerance::default()).unwrap();
        assert!(report.passes());
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evolve_identity_fixed_point() {
        let mut rng = Prng::new(2);
        let rho = DensityOperator::random(qubit(), &mut rng);
        let u = UnitaryOperator::identity(qubit());
        let evolved = evolve(&rho, &u).unwrap();
        assert!(evolved.matrix().sub(rho.matrix()).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn evolve_hadamard_rotation() {
        let inv = 1.0 / 2.0_f64.sqrt();
        let h = ComplexMatrix::from_rows(&[vec![c(inv, 0.0), c(inv, 0.0)], vec![c(inv, 0.0), c(-inv, 0.0)]])
            .unwrap();
        let u = UnitaryOperator::new(qubit(), h, &Tolerance::default()).unwrap();
        let rho = pure_density(&StateVector::basis(qubit(), 0).unwrap());
        let out = evolve(&rho, &u).unwrap();
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert!((out.matrix().get(i, j) - c(0.5, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn evolve_preserves_spectrum() {
        let mut rng = Prng::new(14);
        let tol = Tolerance::default();
        for _ in 0..10 {
            let rho = DensityOperator::random(HilbertSpace::new(3).unwrap(), &mut rng);
            let u = UnitaryOperator::random(HilbertSpace::new(3).unwrap(), &mut rng);
            let evolved = evolve(&rho, &u).unwrap();
            let s1 = eig_hermitian(rho.matrix(), &tol).unwrap().eigenvalues;
            let s2 = eig_hermitian(evolved.matrix(), &tol).unwrap().eigenvalues;
            for (a, b) in s1.iter().zip(&s2) {
                assert!((a - b).abs() < 1e-11);
            }
            assert!((evolved.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dephase_kills_off_diagonals() {
        let m = ComplexMatrix::from_rows(&[vec![c(0.5, 0.0), c(0.5, 0.0)], vec![c(0.5, 0.0), c(0.5, 0.0)]])
            .unwrap();
        let rho = DensityOperator::unchecked(qubit(), m).unwrap();
        let out = dephase(&rho, &ComplexMatrix::identity(2), &Tolerance::default()).unwrap();
        assert!(out.matrix().sub(&ComplexMatrix::diagonal(&[0.5, 0.5])).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn dephase_in_eigenbasis_is_identity() {
        let mut rng = Prng::new(33);
        let rho = DensityOperator::random(HilbertSpace::new(4).unwrap(), &mut rng);
        let eig = eig_hermitian(rho.matrix(), &Tolerance::default()).unwrap();
        let out = dephase(&rho, &eig.eigenvectors, &Tolerance::default()).unwrap();
        assert!(out.matrix().sub(rho.matrix()).unwrap().frobenius_norm() < 1e-11);
    }

    #[test]
    fn dephase_idempotent_and_valid() {
        let mut rng = Prng::new(34);
        let tol = Tolerance::default();
        let rho = DensityOperator::random(HilbertSpace::new(3).unwrap(), &mut rng);
        let basis = crate::random::unitary(&mut rng, 3);
        let once = dephase(&rho, &basis, &tol).unwrap();
        let twice = dephase(&once, &basis, &tol).unwrap();
        assert!(twice.matrix().sub(once.matrix()).unwrap().frobenius_norm() < 1e-13);
        assert!(once.validate(&tol).unwrap().passes());
    }

    #[test]
    fn dephase_rejects_skewed_basis() {
        let rho = DensityOperator::maximally_mixed(qubit());
        let skew = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]])
            .unwrap();
        assert!(dephase(&rho, &skew, &Tolerance::default()).is_err());
    }
}
