//! Event operators and quantum-logic structure.
//!
//! Operationally testable events are projectors; inconclusive events are
//! rank-one operators built from non-basis vectors; prospects pair a testable
//! outcome with an inconclusive event on a second factor. Join and meet give
//! the (non-distributive) lattice of testable events. Events are canonical in
//! the observable's eigenbasis: standard-basis projectors are the primitive,
//! general-basis events enter through an explicit unitary conjugation.

use crate::eig::{eig_hermitian, projector_onto, range_basis};
use crate::matrix::{kron, outer, ComplexMatrix, Tolerance};
use crate::state::{DensityOperator, HilbertSpace, UnitaryOperator};
use crate::{C64, Error, Result};

/// Eigenvalues of a pairwise sum of projectors this close to 2 count as the
/// intersection eigenspace.
const MEET_EIGENVALUE_TOL: f64 = 1e-7;

/// How an event operator was built; drives validation and downstream checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// Operationally testable: idempotent projector.
    Projector,
    /// Union of elementary outcomes (a projector built as Σ_α P_α).
    Union,
    /// Inconclusive event |B⟩⟨B| from a superposition vector.
    Inconclusive,
    /// Composite prospect operator P_n ⊗ P_B.
    Prospect,
}

/// Hermitian operator representing an event, with spectrum in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct EventOperator {
    space: HilbertSpace,
    matrix: ComplexMatrix,
    kind: EventKind,
}

impl EventOperator {
    /// Validating constructor: Hermitian within tolerance, spectrum inside
    /// [−eps_psd, 1+eps_psd], and idempotent when the kind claims a projector.
    pub fn new(
        space: HilbertSpace,
        matrix: ComplexMatrix,
        kind: EventKind,
        tol: &Tolerance,
    ) -> Result<Self> {
        if matrix.rows() != space.dimension() || !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} event operator on a dimension-{} space",
                matrix.rows(),
                matrix.cols(),
                space.dimension()
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > tol.eps_hermitian {
            return Err(Error::NotHermitian { defect, tolerance: tol.eps_hermitian });
        }
        let eig = eig_hermitian(&matrix, tol)?;
        let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
        let max = eig.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -tol.eps_psd || max > 1.0 + tol.eps_psd {
            return Err(Error::Invalid(format!(
                "event spectrum [{min:.6e}, {max:.6e}] outside [0, 1]"
            )));
        }
        if matches!(kind, EventKind::Projector | EventKind::Union) {
            let idem = matrix.mul(&matrix)?.sub(&matrix)?.frobenius_norm();
            if idem > tol.eps_equality {
                return Err(Error::NotProjector(idem));
            }
        }
        Ok(Self { space, matrix, kind })
    }

    pub(crate) fn from_parts(space: HilbertSpace, matrix: ComplexMatrix, kind: EventKind) -> Self {
        Self { space, matrix, kind }
    }

    /// Zero event (never occurs).
    pub fn zero(space: HilbertSpace) -> Self {
        let d = space.dimension();
        Self::from_parts(space, ComplexMatrix::zeros(d, d), EventKind::Projector)
    }

    /// Certain event (identity).
    pub fn certain(space: HilbertSpace) -> Self {
        let d = space.dimension();
        Self::from_parts(space, ComplexMatrix::identity(d), EventKind::Projector)
    }

    /// Rank-one projector |v⟩⟨v| from a unit vector.
    pub fn rank_one(space: HilbertSpace, vector: &[C64], tol: &Tolerance) -> Result<Self> {
        if vector.len() != space.dimension() {
            return Err(Error::DimensionMismatch(format!(
                "length-{} vector on a dimension-{} space",
                vector.len(),
                space.dimension()
            )));
        }
        let norm_sq: f64 = vector.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tol.eps_equality {
            return Err(Error::NormViolation(format!(
                "projector vector has squared norm {norm_sq:.12}"
            )));
        }
        Ok(Self::from_parts(space, outer(vector, vector), EventKind::Projector))
    }

    /// Conjugated event U·E·U† (basis change into a general eigenbasis).
    pub fn conjugated(&self, u: &UnitaryOperator) -> Result<Self> {
        self.space.check_matches(u.space())?;
        let matrix = u.matrix().mul(&self.matrix)?.mul(&u.matrix().adjoint())?;
        Ok(Self::from_parts(self.space.clone(), matrix, self.kind))
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn kind(&self) -> EventKind {
        self.kind
    }

    /// ‖P² − P‖_F.
    pub fn idempotency_defect(&self) -> f64 {
        self.matrix
            .mul(&self.matrix)
            .and_then(|sq| sq.sub(&self.matrix))
            .map(|d| d.frobenius_norm())
            .unwrap_or(f64::INFINITY)
    }

    fn require_projector(&self, tol: &Tolerance) -> Result<()> {
        let defect = self.idempotency_defect();
        if defect > tol.eps_equality {
            return Err(Error::NotProjector(defect));
        }
        Ok(())
    }
}

fn check_indices(space: &HilbertSpace, indices: &[usize]) -> Result<Vec<usize>> {
    if indices.is_empty() {
        return Err(Error::Invalid("empty outcome index set".into()));
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != indices.len() {
        return Err(Error::Invalid("duplicate outcome index".into()));
    }
    if sorted.iter().any(|&i| i >= space.dimension()) {
        return Err(Error::Invalid(format!(
            "outcome index out of range for dimension {}",
            space.dimension()
        )));
    }
    Ok(sorted)
}

/// Standard-basis projector onto the given outcome indices.
pub fn projector(space: &HilbertSpace, indices: &[usize]) -> Result<EventOperator> {
    let sorted = check_indices(space, indices)?;
    let d = space.dimension();
    let mut m = ComplexMatrix::zeros(d, d);
    for &i in &sorted {
        m.set(i, i, C64::new(1.0, 0.0));
    }
    Ok(EventOperator::from_parts(space.clone(), m, EventKind::Projector))
}

/// Union event ∪_α B_α, represented by Σ_α P_α over elementary outcomes.
/// Same matrix as [`projector`]; the kind records that it is a union.
pub fn union_of(space: &HilbertSpace, indices: &[usize]) -> Result<EventOperator> {
    let p = projector(space, indices)?;
    Ok(EventOperator::from_parts(p.space.clone(), p.matrix, EventKind::Union))
}

/// Lattice join: projector onto range(p) + range(q).
pub fn join(p: &EventOperator, q: &EventOperator, tol: &Tolerance) -> Result<EventOperator> {
    p.space().check_matches(q.space())?;
    p.require_projector(tol)?;
    q.require_projector(tol)?;
    let sum = p.matrix().add(q.matrix())?;
    let basis = range_basis(&sum, tol)?;
    let matrix = projector_onto(&basis, p.space().dimension());
    Ok(EventOperator::from_parts(p.space().clone(), matrix, EventKind::Projector))
}

/// Lattice meet: projector onto range(p) ∩ range(q), computed as the
/// eigenvalue-2 eigenspace of p + q.
pub fn meet(p: &EventOperator, q: &EventOperator, tol: &Tolerance) -> Result<EventOperator> {
    p.space().check_matches(q.space())?;
    p.require_projector(tol)?;
    q.require_projector(tol)?;
    let sum = p.matrix().add(q.matrix())?;
    let eig = eig_hermitian(&sum, tol)?;
    let mut basis = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda >= 2.0 - MEET_EIGENVALUE_TOL {
            basis.push(eig.eigenvectors.column(k));
        }
    }
    let matrix = projector_onto(&basis, p.space().dimension());
    Ok(EventOperator::from_parts(p.space().clone(), matrix, EventKind::Projector))
}

/// Inconclusive event: a weighted set of outcomes under deliberation,
/// represented by the vector |B⟩ = Σ_α b_α |α⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct InconclusiveEvent {
    space: HilbertSpace,
    amplitudes: Vec<C64>,
}

impl InconclusiveEvent {
    pub fn new(space: HilbertSpace, amplitudes: Vec<C64>, tol: &Tolerance) -> Result<Self> {
        if amplitudes.len() != space.dimension() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes on a dimension-{} space",
                amplitudes.len(),
                space.dimension()
            )));
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tol.eps_equality {
            return Err(Error::NormViolation(format!(
                "inconclusive amplitudes have squared norm {norm_sq:.12}"
            )));
        }
        Ok(Self { space, amplitudes })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// A single nonzero amplitude means the event collapses to an elementary
    /// outcome and is operationally testable after all.
    pub fn is_operationally_testable(&self) -> bool {
        self.amplitudes.iter().filter(|b| b.norm_sqr() > 0.0).count() == 1
    }
}

/// Rank-one event operator |B⟩⟨B| with entries b_α b*_β. Not idempotent
/// unless a single amplitude survives.
pub fn inconclusive_operator(b: &InconclusiveEvent) -> EventOperator {
    EventOperator::from_parts(
        b.space().clone(),
        outer(b.amplitudes(), b.amplitudes()),
        EventKind::Inconclusive,
    )
}

/// Composite event A_n ⊗ B: a testable outcome on the first factor paired
/// with an inconclusive event on the second.
#[derive(Debug, Clone, PartialEq)]
pub struct Prospect {
    outcome_space: HilbertSpace,
    outcome_index: usize,
    uncertain: InconclusiveEvent,
}

impl Prospect {
    pub fn new(
        outcome_space: HilbertSpace,
        outcome_index: usize,
        uncertain: InconclusiveEvent,
    ) -> Result<Self> {
        if outcome_index >= outcome_space.dimension() {
            return Err(Error::Invalid(format!(
                "outcome index {} out of range for dimension {}",
                outcome_index,
                outcome_space.dimension()
            )));
        }
        Ok(Self { outcome_space, outcome_index, uncertain })
    }

    pub fn outcome_space(&self) -> &HilbertSpace {
        &self.outcome_space
    }

    pub fn outcome_index(&self) -> usize {
        self.outcome_index
    }

    pub fn uncertain(&self) -> &InconclusiveEvent {
        &self.uncertain
    }

    /// Dimension of the composite space the prospect operator acts on.
    pub fn composite_dimension(&self) -> usize {
        self.outcome_space.dimension() * self.uncertain.space().dimension()
    }

    pub fn label(&self) -> String {
        format!("{}*B", self.outcome_space.label(self.outcome_index))
    }
}

/// Prospect operator P_n ⊗ P_B on the composite space. Squares to ⟨π|π⟩·P,
/// hence idempotent exactly when the amplitudes are normalized.
pub fn prospect_operator(pi: &Prospect) -> Result<EventOperator> {
    let p_n = projector(pi.outcome_space(), &[pi.outcome_index()])?;
    let p_b = inconclusive_operator(pi.uncertain());
    let space = pi.outcome_space().tensor(pi.uncertain().space())?;
    let matrix = kron(p_n.matrix(), p_b.matrix());
    Ok(EventOperator::from_parts(space, matrix, EventKind::Prospect))
}

/// Prospect operator from raw (possibly unnormalized) amplitudes; exposes
/// the ⟨π|π⟩ scaling of the square for diagnostics and tests.
pub fn raw_prospect_operator(
    outcome_space: &HilbertSpace,
    outcome_index: usize,
    amplitudes: &[C64],
) -> Result<ComplexMatrix> {
    let p_n = projector(outcome_space, &[outcome_index])?;
    Ok(kron(p_n.matrix(), &outer(amplitudes, amplitudes)))
}

/// Separability verdict relative to the standard-basis projector algebras of
/// the two factors: separable iff diagonal in the product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparabilityReport {
    pub separable: bool,
    /// Largest off-diagonal magnitude.
    pub witness_magnitude: f64,
    /// Row/column of that entry in the product basis.
    pub witness_indices: (usize, usize),
}

/// Classify an operator on a bipartite space as separable or entangled with
/// respect to the projector algebras {P_n}, {P_α}. In that frame the
/// separable span is exactly the diagonal matrices of the product basis, so
/// the test is diagonality; the witness is the largest off-diagonal entry.
pub fn is_separable(
    op: &EventOperator,
    dims: [usize; 2],
    tol: &Tolerance,
) -> Result<SeparabilityReport> {
    let d = dims[0] * dims[1];
    if dims[0] == 0 || dims[1] == 0 || op.matrix().rows() != d {
        return Err(Error::FactorizationMismatch(format!(
            "dims {dims:?} do not factor an operator of side {}",
            op.matrix().rows()
        )));
    }
    let m = op.matrix();
    let mut witness = (0.0_f64, (0usize, 0usize));
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            let a = m.get(i, j).norm();
            if a > witness.0 {
                witness = (a, (i, j));
            }
        }
    }
    Ok(SeparabilityReport {
        separable: witness.0 <= tol.eps_equality,
        witness_magnitude: witness.0,
        witness_indices: witness.1,
    })
}

/// Resolution-of-unity and positivity report for a family of event operators.
#[derive(Debug, Clone)]
pub struct UnityReport {
    /// ‖Σ op − 1‖_F.
    pub defect: f64,
    pub passes: bool,
    /// Minimum eigenvalue of each member.
    pub member_min_eigenvalues: Vec<f64>,
    /// All members positive semidefinite: the family is a POVM candidate.
    pub positive: bool,
}

/// Check Σ op = 1 and per-member positivity.
pub fn resolution_of_unity_check(
    operators: &[EventOperator],
    tol: &Tolerance,
) -> Result<UnityReport> {
    let first = operators
        .first()
        .ok_or_else(|| Error::Invalid("empty operator family".into()))?;
    let d = first.space().dimension();
    let mut sum = ComplexMatrix::zeros(d, d);
    let mut member_min_eigenvalues = Vec::with_capacity(operators.len());
    for op in operators {
        op.space().check_matches(first.space())?;
        sum = sum.add(op.matrix())?;
        member_min_eigenvalues.push(eig_hermitian(op.matrix(), tol)?.min_eigenvalue());
    }
    let defect = sum.sub(&ComplexMatrix::identity(d))?.frobenius_norm();
    let positive = member_min_eigenvalues.iter().all(|&l| l >= -tol.eps_psd);
    Ok(UnityReport { defect, passes: defect <= tol.eps_equality, member_min_eigenvalues, positive })
}

/// One subevent probability recovered by symmetry-breaking extrapolation.
#[derive(Debug, Clone)]
pub struct SubeventProbability {
    /// Index of the eigenvalue group this subevent belongs to.
    pub group: usize,
    /// Unperturbed eigenvalue of the group.
    pub eigenvalue: f64,
    /// ν→0 limit of ⟨v(ν)|ρ|v(ν)⟩.
    pub probability: f64,
    /// |p(ν_last) − p(ν_prev)|, the extrapolation residual.
    pub residual: f64,
}

/// Per-group bookkeeping for the lifting procedure.
#[derive(Debug, Clone)]
pub struct DegenerateGroup {
    pub eigenvalue: f64,
    pub multiplicity: usize,
    /// Sum of extrapolated subevent probabilities in the group.
    pub limit_sum: f64,
    /// Probability of the degenerate event from the unperturbed projector.
    pub projector_probability: f64,
}

/// Full result of degeneracy lifting.
#[derive(Debug, Clone)]
pub struct DegeneracyLifting {
    pub subevents: Vec<SubeventProbability>,
    pub groups: Vec<DegenerateGroup>,
}

/// Default ν sequence: two decades of decrease with Richardson extrapolation
/// on the last two points.
pub const DEFAULT_NU_SEQUENCE: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// [`lift_degeneracy`] with a seeded random Hermitian perturbation and the
/// default ν sequence; generic perturbations split degenerate spectra almost
/// surely.
pub fn lift_degeneracy_seeded(
    observable: &ComplexMatrix,
    rho: &DensityOperator,
    rng: &mut crate::random::Prng,
    tol: &Tolerance,
) -> Result<DegeneracyLifting> {
    let gamma = crate::random::hermitian(rng, observable.rows());
    lift_degeneracy(observable, &gamma, &DEFAULT_NU_SEQUENCE, rho, tol)
}

/// Lift spectral degeneracy of an observable by an infinitesimal
/// symmetry-breaking perturbation: Â → Â + νΓ̂ along a decreasing ν sequence,
/// with Richardson extrapolation of the per-subevent probabilities to ν → 0.
///
/// The perturbed spectra must be nondegenerate at every ν; otherwise the
/// perturbation failed to break the symmetry and the call errors out.
pub fn lift_degeneracy(
    observable: &ComplexMatrix,
    gamma: &ComplexMatrix,
    nu_sequence: &[f64],
    rho: &DensityOperator,
    tol: &Tolerance,
) -> Result<DegeneracyLifting> {
    let n = observable.rows();
    if !observable.is_square() || gamma.rows() != n || !gamma.is_square() {
        return Err(Error::DimensionMismatch("observable and perturbation shapes differ".into()));
    }
    if rho.space().dimension() != n {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs observable dimension {n}",
            rho.space().dimension()
        )));
    }
    for (name, m) in [("observable", observable), ("perturbation", gamma)] {
        let defect = m.hermiticity_defect();
        if defect > tol.eps_hermitian {
            return Err(Error::Invalid(format!("{name} is not Hermitian (defect {defect:.3e})")));
        }
    }
    if nu_sequence.len() < 2 {
        return Err(Error::Invalid("nu sequence needs at least two points".into()));
    }
    if nu_sequence.windows(2).any(|w| w[0] <= w[1]) || nu_sequence.iter().any(|&v| v <= 0.0) {
        return Err(Error::Invalid("nu sequence must be strictly decreasing and positive".into()));
    }
    if *nu_sequence.last().expect("non-empty") > 1e-4 {
        return Err(Error::Invalid("nu sequence must decrease to 1e-4 or below".into()));
    }

    // unperturbed spectrum → degenerate groups
    let base = eig_hermitian(observable, tol)?;
    let scale = base
        .eigenvalues
        .iter()
        .fold(1.0_f64, |acc, &l| acc.max(l.abs()));
    let group_tol = 1e-8 * scale;
    let mut group_of = Vec::with_capacity(n);
    group_of.push(0usize);
    let mut group_values = vec![base.eigenvalues[0]];
    for pair in base.eigenvalues.windows(2) {
        if pair[1] - pair[0] > group_tol {
            group_values.push(pair[1]);
        }
        group_of.push(group_values.len() - 1);
    }

    // probabilities along the ν sequence, ascending perturbed spectrum
    let mut samples: Vec<Vec<f64>> = Vec::with_capacity(nu_sequence.len());
    for &nu in nu_sequence {
        let perturbed = observable.add(&gamma.scale(C64::new(nu, 0.0)))?;
        let eig = eig_hermitian(&perturbed, tol)?;
        let min_gap = eig
            .eigenvalues
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        if min_gap < 1e-12 {
            return Err(Error::IneffectiveSymmetryBreaking { gap: min_gap, nu });
        }
        let probs = (0..n)
            .map(|k| rho.matrix().expectation(&eig.eigenvectors.column(k)))
            .collect::<Result<Vec<f64>>>()?;
        samples.push(probs);
    }

    // Richardson extrapolation on the last two points removes the O(ν) bias
    let m = nu_sequence.len();
    let (nu_prev, nu_last) = (nu_sequence[m - 2], nu_sequence[m - 1]);
    let mut subevents = Vec::with_capacity(n);
    for k in 0..n {
        let p_prev = samples[m - 2][k];
        let p_last = samples[m - 1][k];
        let limit = (nu_prev * p_last - nu_last * p_prev) / (nu_prev - nu_last);
        subevents.push(SubeventProbability {
            group: group_of[k],
            eigenvalue: group_values[group_of[k]],
            probability: limit,
            residual: (p_last - p_prev).abs(),
        });
    }

    let mut groups = Vec::with_capacity(group_values.len());
    for (g, &eigenvalue) in group_values.iter().enumerate() {
        let members: Vec<usize> = (0..n).filter(|&k| group_of[k] == g).collect();
        let mut projector_probability = 0.0;
        for &k in &members {
            projector_probability += rho.matrix().expectation(&base.eigenvectors.column(k))?;
        }
        groups.push(DegenerateGroup {
            eigenvalue,
            multiplicity: members.len(),
            limit_sum: members.iter().map(|&k| subevents[k].probability).sum(),
            projector_probability,
        });
    }

    Ok(DegeneracyLifting { subevents, groups })
}

/// Degenerate event: an observable eigenvalue with its subevent eigenvectors.
#[derive(Debug, Clone)]
pub struct DegenerateEvent {
    observable: ComplexMatrix,
    eigenvalue: f64,
    subevent_vectors: Vec<Vec<C64>>,
}

impl DegenerateEvent {
    /// Validates that every subevent vector is an eigenvector of the
    /// observable for the stated eigenvalue, and that the set is orthonormal.
    pub fn new(
        observable: ComplexMatrix,
        eigenvalue: f64,
        subevent_vectors: Vec<Vec<C64>>,
        tol: &Tolerance,
    ) -> Result<Self> {
        if subevent_vectors.is_empty() {
            return Err(Error::Invalid("degenerate event needs at least one subevent".into()));
        }
        let n = observable.rows();
        let scale = observable.frobenius_norm().max(1.0);
        for v in &subevent_vectors {
            if v.len() != n {
                return Err(Error::DimensionMismatch("subevent vector length".into()));
            }
            let mv = observable.matvec(v)?;
            let residual: f64 = mv
                .iter()
                .zip(v)
                .map(|(a, b)| (a - b * eigenvalue).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if residual > tol.eps_equality * scale {
                return Err(Error::Invalid(format!(
                    "subevent vector is not an eigenvector (residual {residual:.3e})"
                )));
            }
        }
        for (i, a) in subevent_vectors.iter().enumerate() {
            for (j, b) in subevent_vectors.iter().enumerate() {
                let overlap: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                if (overlap - C64::new(expected, 0.0)).norm() > tol.eps_equality {
                    return Err(Error::NotOrthonormal((overlap.norm() - expected).abs()));
                }
            }
        }
        Ok(Self { observable, eigenvalue, subevent_vectors })
    }

    pub fn observable(&self) -> &ComplexMatrix {
        &self.observable
    }

    pub fn eigenvalue(&self) -> f64 {
        self.eigenvalue
    }

    pub fn subevent_vectors(&self) -> &[Vec<C64>] {
        &self.subevent_vectors
    }

    /// Projector Σ_j |n_j⟩⟨n_j| of the degenerate event.
    pub fn projector(&self, space: HilbertSpace) -> Result<EventOperator> {
        if space.dimension() != self.observable.rows() {
            return Err(Error::DimensionMismatch("space vs observable dimension".into()));
        }
        let matrix = projector_onto(&self.subevent_vectors, space.dimension());
        Ok(EventOperator::from_parts(space, matrix, EventKind::Projector))
    }
}
