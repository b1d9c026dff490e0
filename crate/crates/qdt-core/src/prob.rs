//! Probability functionals.
//!
//! Elementary event probabilities Tr(ρP), consecutive-measurement forms
//! (Lüders, Wigner, Kirkwood — the latter two exposed to exhibit why neither
//! is a conditional/joint probability), genuine joint/marginal/conditional
//! probabilities on composite states, and the prospect probability with its
//! utility/attraction split.

use crate::event::{EventOperator, Prospect};
use crate::matrix::{kron, ComplexMatrix, Tolerance};
use crate::state::DensityOperator;
use crate::{C64, Error, Result};

/// Which factor of a bipartite state an operation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    A,
    B,
}

/// Split of a prospect probability into its diagonal (utility) and
/// off-diagonal (attraction) parts: total = utility + attraction by
/// construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityDecomposition {
    pub total: f64,
    pub utility_factor: f64,
    pub attraction_factor: f64,
}

impl ProbabilityDecomposition {
    pub fn new(utility_factor: f64, attraction_factor: f64) -> Self {
        Self { total: utility_factor + attraction_factor, utility_factor, attraction_factor }
    }
}

/// Probability clamped to \[0,1\] for reporting; the raw value is kept when
/// clamping moved it by more than 1e-12 so numerical pathologies stay
/// visible without corrupting downstream normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampedProbability {
    pub value: f64,
    pub raw: Option<f64>,
}

impl ClampedProbability {
    pub fn from_raw(raw: f64) -> Self {
        let value = raw.clamp(0.0, 1.0);
        Self { value, raw: ((raw - value).abs() > 1e-12).then_some(raw) }
    }
}

fn check_event_on(rho: &DensityOperator, p: &EventOperator) -> Result<()> {
    rho.space().check_matches(p.space())
}

/// Probability of an elementary event: Tr(ρ P).
pub fn event_probability(rho: &DensityOperator, p: &EventOperator) -> Result<f64> {
    check_event_on(rho, p)?;
    Ok(rho.matrix().trace_product(p.matrix())?.re)
}

/// State reduction after observing an event: PρP / Tr(ρP).
pub fn luders_state(
    rho: &DensityOperator,
    p_alpha: &EventOperator,
    tol: &Tolerance,
) -> Result<DensityOperator> {
    check_event_on(rho, p_alpha)?;
    let weight = rho.matrix().trace_product(p_alpha.matrix())?.re;
    if weight <= tol.eps_equality {
        return Err(Error::NullConditioning(weight));
    }
    let reduced = p_alpha
        .matrix()
        .mul(rho.matrix())?
        .mul(p_alpha.matrix())?
        .scale(C64::new(1.0 / weight, 0.0));
    DensityOperator::unchecked(rho.space().clone(), reduced)
}

/// A state with two projector events measured back to back: `first` is the
/// conditioning event, `second` the follow-up.
#[derive(Debug, Clone)]
pub struct SequentialPair {
    rho: DensityOperator,
    first: EventOperator,
    second: EventOperator,
}

impl SequentialPair {
    pub fn new(
        rho: DensityOperator,
        first: EventOperator,
        second: EventOperator,
        tol: &Tolerance,
    ) -> Result<Self> {
        rho.space().check_matches(first.space())?;
        rho.space().check_matches(second.space())?;
        for event in [&first, &second] {
            let defect = event.idempotency_defect();
            if defect > tol.eps_equality {
                return Err(Error::NotProjector(defect));
            }
        }
        Ok(Self { rho, first, second })
    }

    pub fn rho(&self) -> &DensityOperator {
        &self.rho
    }

    pub fn first(&self) -> &EventOperator {
        &self.first
    }

    pub fn second(&self) -> &EventOperator {
        &self.second
    }

    /// P_α P_n P_α, the sandwiched second event.
    fn sandwich(&self) -> Result<ComplexMatrix> {
        self.first.matrix().mul(self.second.matrix())?.mul(self.first.matrix())
    }
}

/// Transition probability of consecutive measurements,
/// Tr(ρ P_α P_n P_α) / Tr(ρ P_α).
///
/// For rank-one nondegenerate events this equals |⟨n|α⟩|², symmetric under
/// event interchange, which is exactly why it cannot serve as a conditional
/// probability; with shared eigenbases it collapses to the Kronecker delta.
pub fn luders_probability(pair: &SequentialPair, tol: &Tolerance) -> Result<f64> {
    let weight = pair.rho.matrix().trace_product(pair.first.matrix())?.re;
    if weight <= tol.eps_equality {
        return Err(Error::NullConditioning(weight));
    }
    let numerator = pair.rho.matrix().trace_product(&pair.sandwich()?)?.re;
    Ok(numerator / weight)
}

/// Unnormalized sequential form Tr(ρ P_α P_n P_α); relates to the Lüders
/// probability by a factor of the conditioning-event probability.
pub fn wigner_probability(pair: &SequentialPair) -> Result<f64> {
    Ok(pair.rho.matrix().trace_product(&pair.sandwich()?)?.re)
}

/// Tr(ρ P_n P_α) as a complex number. Generally carries a nonzero imaginary
/// part, which disqualifies it as a probability; exposed for diagnostics.
pub fn kirkwood_form(
    rho: &DensityOperator,
    p_n: &EventOperator,
    p_alpha: &EventOperator,
) -> Result<C64> {
    check_event_on(rho, p_n)?;
    check_event_on(rho, p_alpha)?;
    rho.matrix().trace_product(&p_n.matrix().mul(p_alpha.matrix())?)
}

fn check_bipartite(
    rho_ab: &DensityOperator,
    p_a: &EventOperator,
    p_b: &EventOperator,
) -> Result<()> {
    let d = p_a.space().dimension() * p_b.space().dimension();
    if rho_ab.space().dimension() != d {
        return Err(Error::FactorizationMismatch(format!(
            "composite state dimension {} does not factor as {}x{}",
            rho_ab.space().dimension(),
            p_a.space().dimension(),
            p_b.space().dimension()
        )));
    }
    Ok(())
}

/// Joint probability of a two-event prospect: Tr(ρ_AB · P_A ⊗ P_B).
pub fn joint_probability(
    rho_ab: &DensityOperator,
    p_a: &EventOperator,
    p_b: &EventOperator,
) -> Result<f64> {
    check_bipartite(rho_ab, p_a, p_b)?;
    let op = kron(p_a.matrix(), p_b.matrix());
    Ok(rho_ab.matrix().trace_product(&op)?.re)
}

/// Marginal probability Tr(ρ_AB · P⊗1) or Tr(ρ_AB · 1⊗P).
///
/// The complementary factor's dimension is inferred as total/event; the
/// caller's bipartition must place the event's space in the chosen slot.
pub fn marginal_probability(
    rho_ab: &DensityOperator,
    event: &EventOperator,
    which: Factor,
) -> Result<f64> {
    let d_event = event.space().dimension();
    let d_total = rho_ab.space().dimension();
    if !d_total.is_multiple_of(d_event) {
        return Err(Error::FactorizationMismatch(format!(
            "event dimension {d_event} does not divide composite dimension {d_total}"
        )));
    }
    let d_other = d_total / d_event;
    let op = match which {
        Factor::A => kron(event.matrix(), &ComplexMatrix::identity(d_other)),
        Factor::B => kron(&ComplexMatrix::identity(d_other), event.matrix()),
    };
    Ok(rho_ab.matrix().trace_product(&op)?.re)
}

/// Conditional probability p(A|B) = p(A⊗B)/p(B) (or p(B|A) when conditioned
/// on the A factor). Unlike the Lüders form this is generally asymmetric.
pub fn conditional_probability(
    rho_ab: &DensityOperator,
    p_a: &EventOperator,
    p_b: &EventOperator,
    conditioned_on: Factor,
    tol: &Tolerance,
) -> Result<f64> {
    let joint = joint_probability(rho_ab, p_a, p_b)?;
    let marginal = match conditioned_on {
        Factor::A => marginal_probability(rho_ab, p_a, Factor::A)?,
        Factor::B => marginal_probability(rho_ab, p_b, Factor::B)?,
    };
    if marginal <= tol.eps_equality {
        return Err(Error::NullConditioning(marginal));
    }
    Ok(joint / marginal)
}

/// Prospect probability with its diagonal/off-diagonal split.
///
/// utility = Σ_α |b_α|² ⟨nα|ρ|nα⟩, attraction = Σ_{α≠β} b_α b*_β ⟨nβ|ρ|nα⟩,
/// total = utility + attraction. The total also equals Tr(ρ_AB P̂(π_n)); the
/// split form is used so the identity total = f + q holds by construction.
pub fn prospect_probability(
    rho_ab: &DensityOperator,
    pi: &Prospect,
) -> Result<ProbabilityDecomposition> {
    let da = pi.outcome_space().dimension();
    let db = pi.uncertain().space().dimension();
    if rho_ab.space().dimension() != da * db {
        return Err(Error::FactorizationMismatch(format!(
            "composite state dimension {} does not factor as {da}x{db}",
            rho_ab.space().dimension()
        )));
    }
    let n = pi.outcome_index();
    let b = pi.uncertain().amplitudes();
    let rho = rho_ab.matrix();

    let mut utility = 0.0;
    for (alpha, amp) in b.iter().enumerate() {
        let w = amp.norm_sqr();
        if w > 0.0 {
            utility += w * rho.get(n * db + alpha, n * db + alpha).re;
        }
    }

    let mut attraction = C64::new(0.0, 0.0);
    for (alpha, ba) in b.iter().enumerate() {
        if ba.norm_sqr() == 0.0 {
            continue;
        }
        for (beta, bb) in b.iter().enumerate() {
            if beta == alpha || bb.norm_sqr() == 0.0 {
                continue;
            }
            // Tr(ρ · P_n ⊗ |α⟩⟨β|) = ⟨nβ|ρ|nα⟩
            attraction += ba * bb.conj() * rho.get(n * db + beta, n * db + alpha);
        }
    }

    Ok(ProbabilityDecomposition::new(utility, attraction.re))
}

/// Conditional probability of a prospect with an uncertain condition,
/// with numerator and denominator decomposed into their diagonal and
/// interference parts.
#[derive(Debug, Clone, Copy)]
pub struct UncertainConditional {
    pub probability: f64,
    pub numerator: ProbabilityDecomposition,
    pub denominator: ProbabilityDecomposition,
}

/// p(A_n | B) = p(A_n ⊗ B) / p(B) for an inconclusive condition B.
///
/// The denominator decomposes as Σ_α |b_α|² p(B_α) + q(B), where q(B) is the
/// off-diagonal remainder of the B-marginal Tr(ρ·1⊗P_B).
pub fn conditional_under_uncertainty(
    rho_ab: &DensityOperator,
    pi: &Prospect,
    tol: &Tolerance,
) -> Result<UncertainConditional> {
    let numerator = prospect_probability(rho_ab, pi)?;

    let da = pi.outcome_space().dimension();
    let db = pi.uncertain().space().dimension();
    let b = pi.uncertain().amplitudes();
    let rho = rho_ab.matrix();

    let mut diag = 0.0;
    for (alpha, amp) in b.iter().enumerate() {
        let w = amp.norm_sqr();
        if w == 0.0 {
            continue;
        }
        let mut p_alpha = 0.0;
        for a in 0..da {
            p_alpha += rho.get(a * db + alpha, a * db + alpha).re;
        }
        diag += w * p_alpha;
    }

    let mut off = C64::new(0.0, 0.0);
    for (alpha, ba) in b.iter().enumerate() {
        if ba.norm_sqr() == 0.0 {
            continue;
        }
        for (beta, bb) in b.iter().enumerate() {
            if beta == alpha || bb.norm_sqr() == 0.0 {
                continue;
            }
            for a in 0..da {
                // Tr(ρ · 1 ⊗ |α⟩⟨β|) picks up ⟨aβ|ρ|aα⟩
                off += ba * bb.conj() * rho.get(a * db + beta, a * db + alpha);
            }
        }
    }

    let denominator = ProbabilityDecomposition::new(diag, off.re);
    if denominator.total <= tol.eps_equality {
        return Err(Error::NullConditioning(denominator.total));
    }
    Ok(UncertainConditional {
        probability: numerator.total / denominator.total,
        numerator,
        denominator,
    })
}
