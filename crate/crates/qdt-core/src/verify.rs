//! Runtime invariant suite.
//!
//! Every module's stated invariants, executable on demand: the CLI `verify`
//! command runs these and maps failures to its numerical-failure exit code.
//! Checks are independent and seeded through stable per-check substreams, so
//! the suite is deterministic no matter how the parallel fan-out schedules
//! them.

use crate::channel::{apply_channel, choi_state, run_pipeline, Channel, MeasurementPipeline};
use crate::decision::{
    attraction_prior, decay_attraction, predict, predict_from_state, prisoner_dilemma_scenario,
    AttractionSpec, ProspectLattice, UtilitySpec,
};
use crate::eig::eig_hermitian;
use crate::event::{
    inconclusive_operator, join, lift_degeneracy, meet, projector, prospect_operator,
    raw_prospect_operator, union_of, EventOperator, InconclusiveEvent, Prospect,
};
use crate::matrix::{kron, partial_trace, ComplexMatrix, Tolerance};
use crate::prob::{
    conditional_under_uncertainty, event_probability, luders_probability, prospect_probability,
    wigner_probability, SequentialPair,
};
use crate::random::{self, Prng};
use crate::state::{dephase, evolve, pure_density, DensityOperator, HilbertSpace, StateVector, UnitaryOperator};
use crate::{C64, Result};

/// Outcome of one invariant check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed defect (or margin, for witness-style checks).
    pub defect: f64,
    /// Threshold the defect was held against.
    pub tolerance: f64,
    pub detail: String,
}

struct Outcome {
    defect: f64,
    tolerance: f64,
    passed: bool,
    detail: String,
}

impl Outcome {
    /// Pass when the defect stays at or below the tolerance.
    fn bounded(defect: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self { defect, tolerance, passed: defect <= tolerance, detail: detail.into() }
    }

    /// Witness-style: pass when the observed margin exceeds the threshold.
    fn witness(margin: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self { defect: margin, tolerance: threshold, passed: margin > threshold, detail: detail.into() }
    }

    fn fail(detail: impl Into<String>) -> Self {
        Self { defect: f64::INFINITY, tolerance: 0.0, passed: false, detail: detail.into() }
    }
}

type CheckFn = fn(&mut Prng, &Tolerance) -> Result<Outcome>;

const CHECKS: &[(&str, &str, CheckFn)] = &[
    ("numkernel", "kron_associativity", kron_associativity),
    ("numkernel", "partial_trace_preserves_trace", partial_trace_preserves_trace),
    ("numkernel", "eig_reconstruction", eig_reconstruction),
    ("numkernel", "partial_trace_kron_factorization", partial_trace_kron_factorization),
    ("qstate", "pure_density_idempotent", pure_density_idempotent),
    ("qstate", "evolve_preserves_trace_hermiticity", evolve_preserves_trace_hermiticity),
    ("qstate", "dephase_idempotent", dephase_idempotent),
    ("qstate", "dephase_diagonal_and_validity", dephase_diagonal_and_validity),
    ("eventlogic", "join_meet_lattice_laws", join_meet_lattice_laws),
    ("eventlogic", "non_distributivity_witness", non_distributivity_witness),
    ("eventlogic", "inconclusive_differs_from_union", inconclusive_differs_from_union),
    ("eventlogic", "prospect_square_scaling", prospect_square_scaling),
    ("eventlogic", "degeneracy_lifting_consistency", degeneracy_lifting_consistency),
    ("probability", "luders_symmetry_rank_one", luders_symmetry_rank_one),
    ("probability", "luders_degenerate_asymmetry", luders_degenerate_asymmetry),
    ("probability", "luders_commuting_delta", luders_commuting_delta),
    ("probability", "wigner_relation", wigner_relation),
    ("probability", "decomposition_exactness", decomposition_exactness),
    ("probability", "contrapositive_diagonal_state", contrapositive_diagonal_state),
    ("probability", "contrapositive_sharp_prospect", contrapositive_sharp_prospect),
    ("probability", "probability_bounds", probability_bounds),
    ("probability", "conditional_uncertainty_consistency", conditional_uncertainty_consistency),
    ("channels", "pipeline_states_valid", pipeline_states_valid),
    ("channels", "pipeline_trace_preservation", pipeline_trace_preservation),
    ("channels", "pipeline_product_cuts", pipeline_product_cuts),
    ("channels", "measurement_idempotent", measurement_idempotent),
    ("channels", "evolution_spectrum_vs_measurement", evolution_spectrum_vs_measurement),
    ("channels", "measurement_nonunitary_witness", measurement_nonunitary_witness),
    ("channels", "choi_states_positive", choi_states_positive),
    ("channels", "pipeline_duality_consistency", pipeline_duality_consistency),
    ("qdt", "alternation_all_sources", alternation_all_sources),
    ("qdt", "prediction_normalization", prediction_normalization),
    ("qdt", "range_enforcement", range_enforcement),
    ("qdt", "quarter_law_prior", quarter_law_prior),
    ("qdt", "decay_restores_utility_ordering", decay_restores_utility_ordering),
    ("qdt", "classification_trichotomy", classification_trichotomy),
];

/// Run the whole invariant suite. Checks fan out in parallel when the
/// `parallel` feature is on; results come back in declaration order with
/// deterministic contents either way.
pub fn run_all(seed: u64, tol: &Tolerance) -> Vec<CheckResult> {
    let root = Prng::new(seed);
    crate::par::map_indexed(CHECKS.len(), |i| {
        let (module, name, check) = CHECKS[i];
        let mut rng = root.fork(0x5EED_0000 + i as u64);
        match check(&mut rng, tol) {
            Ok(out) => CheckResult {
                module,
                name,
                passed: out.passed,
                defect: out.defect,
                tolerance: out.tolerance,
                detail: out.detail,
            },
            Err(e) => CheckResult {
                module,
                name,
                passed: false,
                defect: f64::INFINITY,
                tolerance: 0.0,
                detail: format!("errored: {e}"),
            },
        }
    })
}

/// Number of failed checks in a result set.
pub fn failures(results: &[CheckResult]) -> usize {
    results.iter().filter(|r| !r.passed).count()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn space(n: usize) -> HilbertSpace {
    HilbertSpace::new(n).expect("positive dimension")
}

fn integer_matrix(rng: &mut Prng, n: usize) -> ComplexMatrix {
    let data = (0..n * n)
        .map(|_| c(rng.below(7) as f64 - 3.0, rng.below(7) as f64 - 3.0))
        .collect();
    ComplexMatrix::new(n, n, data).expect("finite")
}

// ---------------------------------------------------------------- numkernel

fn kron_associativity(rng: &mut Prng, _tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let a = integer_matrix(rng, 2);
        let b = integer_matrix(rng, 3);
        let d = integer_matrix(rng, 2);
        let left = kron(&kron(&a, &b), &d);
        let right = kron(&a, &kron(&b, &d));
        let gap = left.sub(&right)?.max_abs_entry().0;
        worst = worst.max(gap);
    }
    Ok(Outcome::bounded(worst, 0.0, "integer-entry inputs associate exactly"))
}

fn partial_trace_preserves_trace(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for i in 0..100 {
        let dims: &[usize] = match i % 3 {
            0 => &[2, 2],
            1 => &[2, 3],
            _ => &[2, 2, 2],
        };
        let d: usize = dims.iter().product();
        let m = random::hermitian(rng, d);
        let keep = vec![i % dims.len()];
        let reduced = partial_trace(&m, dims, &keep)?;
        worst = worst.max((reduced.trace() - m.trace()).norm());
    }
    Ok(Outcome::bounded(worst, tol.eps_equality, "100 seeded Hermitian draws"))
}

fn eig_reconstruction(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for i in 0..60 {
        let n = 2 + i % 7;
        let m = random::hermitian(rng, n);
        let eig = eig_hermitian(&m, tol)?;
        let err = eig.reconstruct().sub(&m)?.frobenius_norm() / m.frobenius_norm().max(1.0);
        worst = worst.max(err);
    }
    Ok(Outcome::bounded(worst, 1e-10, "VΛV† reconstruction, dims 2-8"))
}

fn partial_trace_kron_factorization(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let (na, nb) = (2 + rng.below(3), 2 + rng.below(3));
        let a = random::hermitian(rng, na);
        let b = random::hermitian(rng, nb);
        let full = kron(&a, &b);
        let dims = [a.rows(), b.rows()];
        let ra = partial_trace(&full, &dims, &[0])?;
        let rb = partial_trace(&full, &dims, &[1])?;
        let da = ra.sub(&a.scale(b.trace()))?.frobenius_norm();
        let db = rb.sub(&b.scale(a.trace()))?.frobenius_norm();
        worst = worst.max(da).max(db);
    }
    Ok(Outcome::bounded(worst, tol.eps_equality, "product-state reduction identity"))
}

// ------------------------------------------------------------------- qstate

fn pure_density_idempotent(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for i in 0..50 {
        let n = 2 + i % 5;
        let psi = StateVector::new(space(n), random::state_vector(rng, n))?;
        let rho = pure_density(&psi);
        worst = worst.max(rho.matrix().mul(rho.matrix())?.sub(rho.matrix())?.frobenius_norm());
    }
    Ok(Outcome::bounded(worst, tol.eps_equality, "rank-one projector idempotency"))
}

fn evolve_preserves_trace_hermiticity(rng: &mut Prng, _tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for i in 0..50 {
        let n = 2 + i % 4;
        let rho = DensityOperator::random(space(n), rng);
        let u = UnitaryOperator::random(space(n), rng);
        let out = evolve(&rho, &u)?;
        worst = worst
            .max((out.matrix().trace().re - 1.0).abs())
            .max(out.matrix().hermiticity_defect());
    }
    Ok(Outcome::bounded(worst, 1e-12, "trace and Hermiticity under evolution"))
}

fn dephase_idempotent(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for i in 0..30 {
        let n = 2 + i % 4;
        let rho = DensityOperator::random(space(n), rng);
        let basis = random::unitary(rng, n);
        let once = dephase(&rho, &basis, tol)?;
        let twice = dephase(&once, &basis, tol)?;
        worst = worst.max(twice.matrix().sub(once.matrix())?.frobenius_norm());
    }
    Ok(Outcome::bounded(worst, 1e-12, "dephase ∘ dephase = dephase"))
}

fn dephase_diagonal_and_validity(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for i in 0..30 {
        let n = 2 + i % 4;
        let rho = DensityOperator::random(space(n), rng);
        let basis = random::unitary(rng, n);
        let out = dephase(&rho, &basis, tol)?;
        // diagonal in the dephasing basis must be unchanged
        let before = basis.adjoint().mul(rho.matrix())?.mul(&basis)?;
        let after = basis.adjoint().mul(out.matrix())?.mul(&basis)?;
        let mut max_before = f64::NEG_INFINITY;
        let mut max_after = f64::NEG_INFINITY;
        for k in 0..n {
            worst = worst.max((before.get(k, k).re - after.get(k, k).re).abs());
            max_before = max_before.max(before.get(k, k).re);
            max_after = max_after.max(after.get(k, k).re);
        }
        // the largest diagonal entry never decreases
        if max_after < max_before - 1e-12 {
            return Ok(Outcome::fail(format!(
                "largest diagonal fell from {max_before} to {max_after}"
            )));
        }
        let report = out.validate(tol)?;
        if !report.passes() {
            return Ok(Outcome::fail(format!("dephased state invalid: {}", report.describe())));
        }
    }
    Ok(Outcome::bounded(worst, 1e-12, "diagonal preserved, output a valid state"))
}

// --------------------------------------------------------------- eventlogic

fn join_meet_lattice_laws(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for _ in 0..25 {
        let n = 4;
        let draw = |rng: &mut Prng| -> Result<EventOperator> {
            let rank = 1 + rng.below(3);
            EventOperator::new(
                space(n),
                random::projector(rng, n, rank),
                crate::event::EventKind::Projector,
                tol,
            )
        };
        let p = draw(rng)?;
        let q = draw(rng)?;
        let r = draw(rng)?;
        // commutativity of join
        let jpq = join(&p, &q, tol)?;
        let jqp = join(&q, &p, tol)?;
        worst = worst.max(jpq.matrix().sub(jqp.matrix())?.frobenius_norm());
        // associativity of join and meet
        let j_left = join(&jpq, &r, tol)?;
        let j_right = join(&p, &join(&q, &r, tol)?, tol)?;
        worst = worst.max(j_left.matrix().sub(j_right.matrix())?.frobenius_norm());
        let m_left = meet(&meet(&p, &q, tol)?, &r, tol)?;
        let m_right = meet(&p, &meet(&q, &r, tol)?, tol)?;
        worst = worst.max(m_left.matrix().sub(m_right.matrix())?.frobenius_norm());
        // idempotency
        worst = worst.max(join(&p, &p, tol)?.matrix().sub(p.matrix())?.frobenius_norm());
        worst = worst.max(meet(&p, &p, tol)?.matrix().sub(p.matrix())?.frobenius_norm());
    }
    Ok(Outcome::bounded(worst, tol.eps_equality, "commutativity, associativity, idempotency"))
}

fn non_distributivity_witness(_rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let inv = 1.0 / 2.0_f64.sqrt();
    let a = EventOperator::rank_one(space(2), &[c(inv, 0.0), c(inv, 0.0)], tol)?;
    let b1 = projector(&space(2), &[0])?;
    let b2 = projector(&space(2), &[1])?;
    let lhs = meet(&a, &join(&b1, &b2, tol)?, tol)?;
    let defect_left = lhs.matrix().sub(a.matrix())?.frobenius_norm();
    let rhs = join(&meet(&a, &b1, tol)?, &meet(&a, &b2, tol)?, tol)?;
    let defect_right = rhs.matrix().frobenius_norm();
    Ok(Outcome::bounded(
        defect_left.max(defect_right),
        1e-12,
        "meet(A, join(B1,B2)) = A while join(meet(A,B1), meet(A,B2)) = 0",
    ))
}

fn inconclusive_differs_from_union(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut min_gap = f64::INFINITY;
    for i in 0..30 {
        let n = 2 + i % 4;
        let b = InconclusiveEvent::new(space(n), random::state_vector(rng, n), tol)?;
        if b.is_operationally_testable() {
            continue;
        }
        let all: Vec<usize> = (0..n).collect();
        let p_b = inconclusive_operator(&b);
        let union = union_of(&space(n), &all)?;
        min_gap = min_gap.min(p_b.matrix().sub(union.matrix())?.frobenius_norm());
    }
    Ok(Outcome::witness(min_gap, tol.eps_equality, "|B⟩⟨B| never equals Σ_α P_α"))
}

fn prospect_square_scaling(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for i in 0..30 {
        let da = 2 + i % 3;
        let db = 2 + i % 3;
        let scale = if i % 2 == 0 { 1.0 } else { 0.3 + 2.0 * rng.uniform() };
        let amplitudes: Vec<C64> = random::state_vector(rng, db)
            .into_iter()
            .map(|z| z * scale)
            .collect();
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        let raw = raw_prospect_operator(&space(da), rng.below(da), &amplitudes)?;
        let defect = raw
            .mul(&raw)?
            .sub(&raw.scale(c(norm_sq, 0.0)))?
            .frobenius_norm();
        worst = worst.max(defect);
    }
    Ok(Outcome::bounded(worst, tol.eps_equality, "P̂² = ⟨π|π⟩·P̂, normalized and not"))
}

fn degeneracy_lifting_consistency(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let observable = ComplexMatrix::diagonal(&[1.0, 1.0, 2.0]);
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let gamma = random::hermitian(rng, 3);
        let rho = DensityOperator::random(space(3), rng);
        // generic perturbations couple across eigenvalue groups, so the
        // extrapolation bias is O(ν₁ν₂); a finer tail keeps it under 1e-8
        let lift = lift_degeneracy(&observable, &gamma, &[1e-3, 1e-4, 1e-5], &rho, tol)?;
        for s in &lift.subevents {
            if s.probability < -1e-8 {
                return Ok(Outcome::fail(format!("negative subevent probability {}", s.probability)));
            }
        }
        for g in &lift.groups {
            worst = worst.max((g.limit_sum - g.projector_probability).abs());
        }
    }
    Ok(Outcome::bounded(worst, 1e-8, "limits sum to the degenerate-event probability"))
}

// -------------------------------------------------------------- probability

fn luders_symmetry_rank_one(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for i in 0..100 {
        let n = 2 + i % 4;
        let rho = DensityOperator::random(space(n), rng);
        let v = random::state_vector(rng, n);
        let w = random::state_vector(rng, n);
        let pv = EventOperator::rank_one(space(n), &v, tol)?;
        let pw = EventOperator::rank_one(space(n), &w, tol)?;
        let forward = SequentialPair::new(rho.clone(), pv.clone(), pw.clone(), tol)?;
        let backward = SequentialPair::new(rho, pw, pv, tol)?;
        worst = worst
            .max((luders_probability(&forward, tol)? - luders_probability(&backward, tol)?).abs());
    }
    Ok(Outcome::bounded(worst, 1e-12, "100 draws, dims 2-5"))
}

fn luders_degenerate_asymmetry(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut best = 0.0_f64;
    for _ in 0..5 {
        let rho = DensityOperator::random(space(3), rng);
        let u = random::unitary(rng, 3);
        let degenerate = EventOperator::new(
            space(3),
            crate::eig::projector_onto(&[u.column(0), u.column(1)], 3),
            crate::event::EventKind::Projector,
            tol,
        )?;
        let sharp = projector(&space(3), &[0])?;
        let forward = SequentialPair::new(rho.clone(), degenerate.clone(), sharp.clone(), tol)?;
        let backward = SequentialPair::new(rho, sharp, degenerate, tol)?;
        best = best
            .max((luders_probability(&forward, tol)? - luders_probability(&backward, tol)?).abs());
    }
    Ok(Outcome::witness(best, 1e-3, "degenerate events break the symmetry"))
}

fn luders_commuting_delta(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for i in 0..100 {
        let n = 2 + i % 4;
        let rho = DensityOperator::random(space(n), rng);
        let alpha = rng.below(n);
        let idx = rng.below(n);
        let pair = SequentialPair::new(
            rho,
            projector(&space(n), &[alpha])?,
            projector(&space(n), &[idx])?,
            tol,
        )?;
        let p = luders_probability(&pair, tol)?;
        let expected = if idx == alpha { 1.0 } else { 0.0 };
        worst = worst.max((p - expected).abs());
    }
    Ok(Outcome::bounded(worst, 0.0, "shared eigenbasis gives the exact Kronecker delta"))
}

fn wigner_relation(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for i in 0..100 {
        let n = 2 + i % 4;
        let rho = DensityOperator::random(space(n), rng);
        let first = EventOperator::rank_one(space(n), &random::state_vector(rng, n), tol)?;
        let second = EventOperator::rank_one(space(n), &random::state_vector(rng, n), tol)?;
        let marginal = event_probability(&rho, &first)?;
        let pair = SequentialPair::new(rho, first, second, tol)?;
        worst = worst
            .max((wigner_probability(&pair)? - luders_probability(&pair, tol)? * marginal).abs());
    }
    Ok(Outcome::bounded(worst, 1e-12, "p_W = p_L · p(B) identically"))
}

fn random_prospect(rng: &mut Prng, da: usize, db: usize, tol: &Tolerance) -> Result<Prospect> {
    Prospect::new(
        space(da),
        rng.below(da),
        InconclusiveEvent::new(space(db), random::state_vector(rng, db), tol)?,
    )
}

fn decomposition_exactness(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for i in 0..100 {
        let da = 2 + i % 3;
        let db = 2 + (i / 3) % 3;
        let rho = DensityOperator::random(space(da * db), rng);
        let pi = random_prospect(rng, da, db, tol)?;
        let d = prospect_probability(&rho, &pi)?;
        if d.total != d.utility_factor + d.attraction_factor {
            return Ok(Outcome::fail("total deviates from f + q".to_string()));
        }
        let op = prospect_operator(&pi)?;
        let direct = rho.matrix().trace_product(op.matrix())?.re;
        worst = worst.max((d.total - direct).abs() / direct.abs().max(1.0));
    }
    Ok(Outcome::bounded(worst, 1e-14, "split total equals the operator trace"))
}

fn contrapositive_diagonal_state(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for i in 0..100 {
        let da = 2 + i % 3;
        let db = 2 + (i / 3) % 3;
        let d = da * db;
        let mut weights: Vec<f64> = (0..d).map(|_| rng.uniform() + 1e-3).collect();
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        let rho = DensityOperator::unchecked(space(d), ComplexMatrix::diagonal(&weights))?;
        let pi = random_prospect(rng, da, db, tol)?;
        worst = worst.max(prospect_probability(&rho, &pi)?.attraction_factor.abs());
    }
    Ok(Outcome::bounded(worst, 1e-12, "product-basis diagonal states have q = 0"))
}

fn contrapositive_sharp_prospect(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for i in 0..100 {
        let da = 2 + i % 3;
        let db = 2 + (i / 3) % 3;
        let rho = DensityOperator::random(space(da * db), rng);
        let mut amplitudes = vec![c(0.0, 0.0); db];
        amplitudes[rng.below(db)] = c(1.0, 0.0);
        let pi = Prospect::new(
            space(da),
            rng.below(da),
            InconclusiveEvent::new(space(db), amplitudes, tol)?,
        )?;
        worst = worst.max(prospect_probability(&rho, &pi)?.attraction_factor.abs());
    }
    Ok(Outcome::bounded(worst, 0.0, "single-amplitude prospects have q = 0 exactly"))
}

fn probability_bounds(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for i in 0..100 {
        let da = 2 + i % 3;
        let db = 2 + (i / 3) % 3;
        let rho = DensityOperator::random(space(da * db), rng);
        let d = prospect_probability(&rho, &random_prospect(rng, da, db, tol)?)?;
        worst = worst
            .max(-d.total)
            .max(d.total - 1.0)
            .max(d.attraction_factor.abs() - 1.0)
            .max(0.0);
    }
    Ok(Outcome::bounded(worst, 1e-12, "0 ≤ p ≤ 1 and |q| ≤ 1"))
}

fn conditional_uncertainty_consistency(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for i in 0..50 {
        let da = 2 + i % 3;
        let db = 2 + (i / 2) % 3;
        let rho = DensityOperator::random(space(da * db), rng);
        let pi = random_prospect(rng, da, db, tol)?;
        let out = conditional_under_uncertainty(&rho, &pi, tol)?;
        // numerator and denominator splits must each be exact
        if out.numerator.total != out.numerator.utility_factor + out.numerator.attraction_factor {
            return Ok(Outcome::fail("numerator split broken".to_string()));
        }
        // denominator equals the B-marginal of the inconclusive operator
        let p_b = inconclusive_operator(pi.uncertain());
        let lifted = kron(&ComplexMatrix::identity(da), p_b.matrix());
        let marginal = rho.matrix().trace_product(&lifted)?.re;
        worst = worst.max((out.denominator.total - marginal).abs());
        worst = worst.max((out.probability - out.numerator.total / out.denominator.total).abs());
    }
    Ok(Outcome::bounded(worst, 1e-12, "denominator matches Tr(ρ·1⊗P_B)"))
}

// ----------------------------------------------------------------- channels

fn seeded_pipeline_run(
    rng: &mut Prng,
    tol: &Tolerance,
) -> Result<crate::channel::PipelineRun> {
    let spaces = [space(2), space(2), space(2)];
    let pipeline = MeasurementPipeline::seeded(spaces, rng, tol)?;
    let a = DensityOperator::random(space(2), rng);
    let b = DensityOperator::random(space(2), rng);
    let m = DensityOperator::random(space(2), rng);
    run_pipeline(&pipeline, [&a, &b, &m])
}

fn pipeline_states_valid(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for trial in 0..50u64 {
        let mut local = rng.fork(trial);
        let run = seeded_pipeline_run(&mut local, tol)?;
        for state in &run.trajectory {
            let report = state.validate(tol)?;
            worst = worst
                .max(report.hermiticity_defect)
                .max(-report.min_eigenvalue)
                .max(report.trace_defect)
                .max(0.0);
        }
    }
    Ok(Outcome::bounded(worst, tol.eps_psd, "50 seeded pipelines, every state valid"))
}

fn pipeline_trace_preservation(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for trial in 0..50u64 {
        let mut local = rng.fork(trial);
        let run = seeded_pipeline_run(&mut local, tol)?;
        for audit in &run.step_audits {
            worst = worst.max((audit.trace - 1.0).abs());
        }
    }
    Ok(Outcome::bounded(worst, 1e-12, "trace preserved at every step"))
}

fn pipeline_product_cuts(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for trial in 0..50u64 {
        let mut local = rng.fork(trial);
        let run = seeded_pipeline_run(&mut local, tol)?;
        worst = worst.max(run.b_cut_defect).max(run.a_cut_defect);
    }
    Ok(Outcome::bounded(worst, 1e-10, "product across (AM|B) after C3, (A|BM) after C5"))
}

fn measurement_idempotent(rng: &mut Prng, _tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let rho = DensityOperator::random(space(8), rng);
        let ch = Channel::measurement(vec![1], vec![2, 2, 2])?;
        let once = apply_channel(&rho, &ch)?;
        let twice = apply_channel(&once, &ch)?;
        worst = worst.max(twice.matrix().sub(once.matrix())?.frobenius_norm());
    }
    Ok(Outcome::bounded(worst, 1e-12, "repeating a cut changes nothing"))
}

fn evolution_spectrum_vs_measurement(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst_evolution = 0.0_f64;
    let mut best_measurement = 0.0_f64;
    for _ in 0..10 {
        let rho = DensityOperator::random(space(4), rng);
        let u = Channel::evolution(random::unitary(rng, 4), vec![2, 2], tol)?;
        let evolved = apply_channel(&rho, &u)?;
        let s_in = eig_hermitian(rho.matrix(), tol)?.eigenvalues;
        let s_out = eig_hermitian(evolved.matrix(), tol)?.eigenvalues;
        for (a, b) in s_in.iter().zip(&s_out) {
            worst_evolution = worst_evolution.max((a - b).abs());
        }
        let m = Channel::measurement(vec![0], vec![2, 2])?;
        let measured = apply_channel(&rho, &m)?;
        let s_m = eig_hermitian(measured.matrix(), tol)?.eigenvalues;
        let drift: f64 = s_in.iter().zip(&s_m).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        best_measurement = best_measurement.max(drift);
    }
    if worst_evolution > 1e-10 {
        return Ok(Outcome::fail(format!("evolution drifted spectrum by {worst_evolution:.3e}")));
    }
    Ok(Outcome::witness(
        best_measurement,
        1e-6,
        "unitary steps preserve spectra, cuts generally do not",
    ))
}

fn measurement_nonunitary_witness(_rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    // two equal-trace (indeed equal-spectrum) inputs, different output spectra
    let inv = 1.0 / 2.0_f64.sqrt();
    let bell = pure_density(&StateVector::new(
        space(4),
        vec![c(inv, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(inv, 0.0)],
    )?);
    let product = pure_density(&StateVector::basis(space(4), 0)?);
    let ch = Channel::measurement(vec![0], vec![2, 2])?;
    let out_bell = apply_channel(&bell, &ch)?;
    let out_product = apply_channel(&product, &ch)?;
    let s_bell = eig_hermitian(out_bell.matrix(), tol)?.eigenvalues;
    let s_product = eig_hermitian(out_product.matrix(), tol)?.eigenvalues;
    let gap: f64 = s_bell
        .iter()
        .zip(&s_product)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(Outcome::witness(gap, 0.1, "no unitary maps equal spectra to unequal spectra"))
}

fn choi_states_positive(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let results = crate::par::map_indexed(50, |trial| -> Result<f64> {
        let mut local = rng.fork(trial as u64);
        let pipeline = MeasurementPipeline::seeded([space(2), space(2), space(2)], &mut local, tol)?;
        let mut worst = f64::INFINITY;
        for step in pipeline.steps() {
            let dual = choi_state(step)?;
            let min_eig = eig_hermitian(dual.matrix(), tol)?.min_eigenvalue();
            worst = worst.min(min_eig);
        }
        Ok(worst)
    });
    let mut min_eig = f64::INFINITY;
    for r in results {
        min_eig = min_eig.min(r?);
    }
    Ok(Outcome::bounded((-min_eig).max(0.0), 1e-10, "every dual state is PSD"))
}

fn pipeline_duality_consistency(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for trial in 0..50u64 {
        let mut local = rng.fork(trial);
        let run = seeded_pipeline_run(&mut local, tol)?;
        worst = worst.max(run.duality_defect);
    }
    Ok(Outcome::bounded(worst, 1e-12, "pipeline outcomes match the dual composite state"))
}

// ---------------------------------------------------------------------- qdt

fn alternation_all_sources(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    // prior source
    for _ in 0..20 {
        let n = 2 + rng.below(5);
        let mut signs: Vec<i8> = (0..n).map(|_| if rng.uniform() < 0.5 { -1 } else { 1 }).collect();
        signs[0] = 1;
        signs[n - 1] = -1;
        worst = worst.max(attraction_prior(n, &signs)?.iter().sum::<f64>().abs());
    }
    // quantum source, after renormalization
    for _ in 0..20 {
        let (da, db) = (2 + rng.below(2), 2 + rng.below(2));
        let rho = DensityOperator::random(space(da * db), rng);
        let mut prospects = Vec::with_capacity(da);
        for n in 0..da {
            prospects.push(Prospect::new(
                space(da),
                n,
                InconclusiveEvent::new(space(db), random::state_vector(rng, db), tol)?,
            )?);
        }
        let labels = (0..da).map(|n| format!("pi{n}")).collect();
        let lattice = ProspectLattice::quantum(labels, prospects)?;
        let report = predict_from_state(&rho, &lattice, 0.0, 1.0, tol)?;
        let q_sum: f64 = report.rows.iter().map(|r| r.attraction_factor).sum();
        worst = worst.max(q_sum.abs());
    }
    // decay preserves the law
    let decayed = decay_attraction(&[-0.25, 0.1, 0.15], 0.7, 2.0)?;
    worst = worst.max(decayed.iter().sum::<f64>().abs());
    Ok(Outcome::bounded(worst, 1e-12, "Σq = 0 from prior, state, decay"))
}

fn prediction_normalization(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let n = 2 + rng.below(4);
        let utilities: Vec<f64> = (0..n).map(|_| rng.uniform() + 0.05).collect();
        let mut signs: Vec<i8> = (0..n).map(|_| if rng.uniform() < 0.5 { -1 } else { 1 }).collect();
        signs[0] = 1;
        signs[n - 1] = -1;
        let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let lattice = ProspectLattice::abstract_lattice(labels)?;
        let utility = UtilitySpec::utilities(utilities);
        let attraction = AttractionSpec::quarter_law(signs).with_information(rng.uniform(), 1.0);
        match predict(&lattice, &utility, &attraction, tol) {
            Ok(report) => worst = worst.max(report.normalization_defect),
            // a prior can push some p outside [0,1]; rejection is correct
            Err(crate::Error::PriorIncompatible { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(Outcome::bounded(worst, 1e-12, "Σp = 1 whenever Σf = 1 and Σq = 0"))
}

fn range_enforcement(_rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    // violating specs must be rejected, never clamped
    let lattice = ProspectLattice::abstract_lattice(vec!["a".into(), "b".into()])?;
    let utility = UtilitySpec::direct(vec![0.9, 0.1]);
    let attraction = AttractionSpec::quarter_law(vec![1, -1]);
    let incompatible = predict(&lattice, &utility, &attraction, tol).is_err();

    let bad_explicit = predict(
        &lattice,
        &UtilitySpec::direct(vec![0.5, 0.5]),
        &AttractionSpec::explicit(vec![0.3, 0.1]),
        tol,
    )
    .is_err();

    let ok = predict(
        &lattice,
        &UtilitySpec::direct(vec![0.5, 0.5]),
        &AttractionSpec::explicit(vec![0.3, -0.3]),
        tol,
    )?;
    let in_range = ok
        .rows
        .iter()
        .all(|r| (0.0..=1.0).contains(&r.probability) && r.attraction_factor.abs() <= 1.0);

    if incompatible && bad_explicit && in_range {
        Ok(Outcome::bounded(0.0, 0.0, "violating specs rejected, emitted values in range"))
    } else {
        Ok(Outcome::fail("range enforcement failed"))
    }
}

fn quarter_law_prior(rng: &mut Prng, _tol: &Tolerance) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for _ in 0..30 {
        let n = 2 + rng.below(6);
        let mut signs: Vec<i8> = (0..n).map(|_| if rng.uniform() < 0.5 { -1 } else { 1 }).collect();
        signs[0] = 1;
        signs[n - 1] = -1;
        let q = attraction_prior(n, &signs)?;
        let mean_abs: f64 = q.iter().map(|v| v.abs()).sum::<f64>() / n as f64;
        worst = worst.max((mean_abs - 0.25).abs());
    }
    if attraction_prior(4, &[1, 1, 1, 1]).is_ok() {
        return Ok(Outcome::fail("uniform signs must be rejected".to_string()));
    }
    Ok(Outcome::bounded(worst, 4.0 * f64::EPSILON, "mean |q| = 1/4, uniform signs rejected"))
}

fn decay_restores_utility_ordering(rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    for _ in 0..20 {
        let n = 2 + rng.below(3);
        let utilities: Vec<f64> = (0..n).map(|_| rng.uniform() + 0.05).collect();
        let mut signs: Vec<i8> = (0..n).map(|_| if rng.uniform() < 0.5 { -1 } else { 1 }).collect();
        signs[0] = 1;
        signs[n - 1] = -1;
        let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let lattice = ProspectLattice::abstract_lattice(labels)?;
        let utility = UtilitySpec::utilities(utilities);
        let attraction = AttractionSpec::quarter_law(signs).with_information(50.0, 1.0);
        let report = match predict(&lattice, &utility, &attraction, tol) {
            Ok(r) => r,
            Err(crate::Error::PriorIncompatible { .. }) => continue,
            Err(e) => return Err(e),
        };
        for row in &report.rows {
            if row.rank_by_p != row.rank_by_f {
                return Ok(Outcome::fail(format!(
                    "at μ = 50μ_c the preference order must follow utility ({} vs {})",
                    row.rank_by_p, row.rank_by_f
                )));
            }
        }
    }
    Ok(Outcome::bounded(0.0, 0.0, "μ ≥ 50·μ_c forces the classical ordering"))
}

fn classification_trichotomy(_rng: &mut Prng, tol: &Tolerance) -> Result<Outcome> {
    let scenario = prisoner_dilemma_scenario();
    let report = predict(&scenario.lattice()?, &scenario.utility, &scenario.attraction, tol)?;
    // three independent orderings; the witness: more useful yet less preferable
    let useful_first = report.rows.iter().position(|r| r.rank_by_f == 1).expect("rank");
    let preferred_first = report.rows.iter().position(|r| r.rank_by_p == 1).expect("rank");
    if useful_first == preferred_first {
        return Ok(Outcome::fail(
            "prisoner dilemma must rank usefulness and preference differently".to_string(),
        ));
    }
    // ranks are permutations
    for ranks in [
        report.rows.iter().map(|r| r.rank_by_p).collect::<Vec<_>>(),
        report.rows.iter().map(|r| r.rank_by_f).collect::<Vec<_>>(),
        report.rows.iter().map(|r| r.rank_by_q).collect::<Vec<_>>(),
    ] {
        let mut sorted = ranks.clone();
        sorted.sort_unstable();
        if sorted != (1..=report.rows.len()).collect::<Vec<_>>() {
            return Ok(Outcome::fail(format!("ranking {ranks:?} is not a permutation")));
        }
    }
    Ok(Outcome::bounded(0.0, 0.0, "useful ≠ preferable witness, rankings are permutations"))
}
