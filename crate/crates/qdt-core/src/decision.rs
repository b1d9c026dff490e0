//! Decision-theory layer: prospect lattices, utility factors, attraction
//! factors and the prediction engine.
//!
//! A prospect's probability splits into a utility factor f (its classical,
//! diagonal part) and an attraction factor q (the interference part encoding
//! subjective attitude). Attraction factors obey the alternation law Σq = 0
//! and, absent other information, the quarter law: mean |q| = 1/4 serves as
//! the non-informative prior. Additional information decays q exponentially,
//! which recovers classical choice in the large-information limit and
//! produces preference reversal along the way.

use crate::event::{prospect_operator, resolution_of_unity_check, Prospect};
use crate::matrix::Tolerance;
use crate::prob::{prospect_probability, ProbabilityDecomposition};
use crate::state::DensityOperator;
use crate::{Error, Result};

/// Ordered family of at least two labeled prospects. Quantum prospects are
/// optional: a purely abstract lattice (labels only) supports prediction from
/// priors, a quantum lattice also supports evaluation against a state.
#[derive(Debug, Clone)]
pub struct ProspectLattice {
    labels: Vec<String>,
    prospects: Option<Vec<Prospect>>,
}

impl ProspectLattice {
    pub fn abstract_lattice(labels: Vec<String>) -> Result<Self> {
        Self::check_labels(&labels)?;
        Ok(Self { labels, prospects: None })
    }

    pub fn quantum(labels: Vec<String>, prospects: Vec<Prospect>) -> Result<Self> {
        Self::check_labels(&labels)?;
        if prospects.len() != labels.len() {
            return Err(Error::Invalid(format!(
                "{} prospects for {} labels",
                prospects.len(),
                labels.len()
            )));
        }
        let d = prospects[0].composite_dimension();
        if prospects.iter().any(|p| p.composite_dimension() != d) {
            return Err(Error::DimensionMismatch(
                "prospects must share one composite space".into(),
            ));
        }
        Ok(Self { labels, prospects: Some(prospects) })
    }

    fn check_labels(labels: &[String]) -> Result<()> {
        if labels.len() < 2 {
            return Err(Error::Invalid("a prospect lattice needs at least two prospects".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if !labels.iter().all(|l| seen.insert(l)) {
            return Err(Error::Invalid("prospect labels must be unique".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn prospects(&self) -> Option<&[Prospect]> {
        self.prospects.as_deref()
    }
}

/// How utility factors are supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UtilityMode {
    /// Values are the factors themselves: each in \[0,1\], summing to one.
    DirectFactors,
    /// Values are nonnegative utilities, normalized linearly.
    NonnegativeUtilities,
}

/// Utility input for a lattice.
#[derive(Debug, Clone)]
pub struct UtilitySpec {
    pub mode: UtilityMode,
    pub values: Vec<f64>,
}

impl UtilitySpec {
    pub fn direct(values: Vec<f64>) -> Self {
        Self { mode: UtilityMode::DirectFactors, values }
    }

    pub fn utilities(values: Vec<f64>) -> Self {
        Self { mode: UtilityMode::NonnegativeUtilities, values }
    }
}

/// Normalized utility factors: f_n ∈ \[0,1\], Σf = 1.
pub fn utility_factors(spec: &UtilitySpec, tol: &Tolerance) -> Result<Vec<f64>> {
    if spec.values.len() < 2 {
        return Err(Error::Invalid("need at least two utility values".into()));
    }
    if spec.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("non-finite utility value".into()));
    }
    match spec.mode {
        UtilityMode::DirectFactors => {
            if spec.values.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                return Err(Error::Invalid("utility factors must lie in [0,1]".into()));
            }
            let sum: f64 = spec.values.iter().sum();
            if (sum - 1.0).abs() > tol.eps_equality.max(1e-9) {
                return Err(Error::Invalid(format!(
                    "utility factors must sum to 1, got {sum:.12}"
                )));
            }
            Ok(spec.values.clone())
        }
        UtilityMode::NonnegativeUtilities => {
            if spec.values.iter().any(|&v| v < 0.0) {
                return Err(Error::Invalid("utilities must be nonnegative".into()));
            }
            let sum: f64 = spec.values.iter().sum();
            if sum <= 0.0 {
                return Err(Error::Invalid("utilities must not all be zero".into()));
            }
            Ok(spec.values.iter().map(|v| v / sum).collect())
        }
    }
}

/// Where attraction factors come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttractionMode {
    /// Quarter-law prior: mean |q| = 1/4 with user-chosen signs.
    QuarterLawPrior,
    /// Off-diagonal parts of a supplied quantum state (see
    /// [`evaluate_lattice`]).
    FromQuantumState,
    /// Explicit values, validated against the alternation law and range.
    Explicit,
}

/// Attraction input for a lattice, with the information level μ and critical
/// information μ_c that drive the decay law.
#[derive(Debug, Clone)]
pub struct AttractionSpec {
    pub mode: AttractionMode,
    pub signs: Option<Vec<i8>>,
    pub magnitudes: Option<Vec<f64>>,
    pub mu: f64,
    pub mu_c: f64,
}

impl AttractionSpec {
    pub fn quarter_law(signs: Vec<i8>) -> Self {
        Self { mode: AttractionMode::QuarterLawPrior, signs: Some(signs), magnitudes: None, mu: 0.0, mu_c: 1.0 }
    }

    pub fn explicit(values: Vec<f64>) -> Self {
        Self { mode: AttractionMode::Explicit, signs: None, magnitudes: Some(values), mu: 0.0, mu_c: 1.0 }
    }

    pub fn with_information(mut self, mu: f64, mu_c: f64) -> Self {
        self.mu = mu;
        self.mu_c = mu_c;
        self
    }
}

/// Quarter-law prior attraction factors.
///
/// Signs are ±1 per prospect; the positive group shares +c and the negative
/// group −c uniformly, with c = N/8 so that mean |q| = 1/4 and Σq = 0.
pub fn attraction_prior(n_prospects: usize, signs: &[i8]) -> Result<Vec<f64>> {
    if signs.len() != n_prospects {
        return Err(Error::Invalid(format!(
            "{} signs for {} prospects",
            signs.len(),
            n_prospects
        )));
    }
    if signs.iter().any(|s| *s != 1 && *s != -1) {
        return Err(Error::Invalid("signs must be +1 or -1".into()));
    }
    let plus = signs.iter().filter(|&&s| s == 1).count();
    let minus = signs.len() - plus;
    if plus == 0 || minus == 0 {
        return Err(Error::AlternationUnsatisfiable(
            "all prospects share one sign, so the attraction factors cannot sum to zero".into(),
        ));
    }
    let group_total = n_prospects as f64 / 8.0;
    Ok(signs
        .iter()
        .map(|&s| {
            if s == 1 {
                group_total / plus as f64
            } else {
                -group_total / minus as f64
            }
        })
        .collect())
}

/// Exponential information decay of attraction factors: q ↦ q·e^(−μ/μ_c).
/// Preserves Σq = 0 and shrinks every magnitude; no renormalization of the
/// decayed values is applied.
pub fn decay_attraction(q: &[f64], mu: f64, mu_c: f64) -> Result<Vec<f64>> {
    if mu_c <= 0.0 || !mu_c.is_finite() {
        return Err(Error::Invalid(format!("critical information must be positive, got {mu_c}")));
    }
    if mu < 0.0 || !mu.is_finite() {
        return Err(Error::Invalid(format!("information measure must be nonnegative, got {mu}")));
    }
    let factor = (-mu / mu_c).exp();
    Ok(q.iter().map(|v| v * factor).collect())
}

/// Raw attraction factors of a quantum lattice plus its law defects.
#[derive(Debug, Clone)]
pub struct AttractionFromState {
    /// Off-diagonal attraction factor of each lattice member (unnormalized).
    pub q: Vec<f64>,
    /// |Σq| before any renormalization.
    pub alternation_defect: f64,
    /// ‖Σ_n P̂(π_n) − 1‖_F over the prospect operators.
    pub resolution_defect: f64,
}

/// Attraction factors read off a quantum state, with the alternation and
/// resolution-of-unity defects reported rather than hidden.
pub fn attraction_from_state(
    rho_ab: &DensityOperator,
    lattice: &ProspectLattice,
    tol: &Tolerance,
) -> Result<AttractionFromState> {
    let prospects = lattice
        .prospects()
        .ok_or_else(|| Error::Invalid("lattice carries no quantum prospects".into()))?;
    let mut q = Vec::with_capacity(prospects.len());
    for pi in prospects {
        q.push(prospect_probability(rho_ab, pi)?.attraction_factor);
    }
    let operators = prospects
        .iter()
        .map(prospect_operator)
        .collect::<Result<Vec<_>>>()?;
    let unity = resolution_of_unity_check(&operators, tol)?;
    Ok(AttractionFromState {
        alternation_defect: q.iter().sum::<f64>().abs(),
        resolution_defect: unity.defect,
        q,
    })
}

/// Raw and renormalized decompositions of a quantum lattice.
///
/// The prospect operators of a lattice with a shared inconclusive part cannot
/// resolve unity, so the raw probabilities need not sum to one. Probabilities
/// are renormalized by Σp and utility factors by Σf (so both probability
/// measures are restored), and the normalized attraction factor is their
/// difference, which keeps p = f + q exact and Σq = 0.
#[derive(Debug, Clone)]
pub struct LatticeEvaluation {
    pub raw: Vec<ProbabilityDecomposition>,
    pub normalized: Vec<ProbabilityDecomposition>,
    /// Σ of raw totals (the pre-normalization sum).
    pub probability_sum_raw: f64,
    /// Σ of raw utility factors.
    pub utility_sum_raw: f64,
    /// |Σq| of the raw rows.
    pub alternation_defect_raw: f64,
    /// ‖Σ_n P̂(π_n) − 1‖_F.
    pub resolution_defect: f64,
}

/// Evaluate a quantum lattice against a state: raw rows plus the
/// renormalized probability measure.
pub fn evaluate_lattice(
    rho_ab: &DensityOperator,
    lattice: &ProspectLattice,
    tol: &Tolerance,
) -> Result<LatticeEvaluation> {
    let prospects = lattice
        .prospects()
        .ok_or_else(|| Error::Invalid("lattice carries no quantum prospects".into()))?;
    let mut raw = Vec::with_capacity(prospects.len());
    for pi in prospects {
        raw.push(prospect_probability(rho_ab, pi)?);
    }
    let probability_sum_raw: f64 = raw.iter().map(|d| d.total).sum();
    let utility_sum_raw: f64 = raw.iter().map(|d| d.utility_factor).sum();
    if probability_sum_raw <= tol.eps_equality {
        return Err(Error::Invalid(format!(
            "lattice has vanishing total probability {probability_sum_raw:.3e}"
        )));
    }
    if utility_sum_raw <= tol.eps_equality {
        return Err(Error::Invalid(format!(
            "lattice has vanishing total utility factor {utility_sum_raw:.3e}"
        )));
    }
    let normalized = raw
        .iter()
        .map(|d| {
            let p = d.total / probability_sum_raw;
            let f = d.utility_factor / utility_sum_raw;
            ProbabilityDecomposition { total: p, utility_factor: f, attraction_factor: p - f }
        })
        .collect();

    let operators = prospects
        .iter()
        .map(prospect_operator)
        .collect::<Result<Vec<_>>>()?;
    let unity = resolution_of_unity_check(&operators, tol)?;
    let alternation_defect_raw = raw.iter().map(|d| d.attraction_factor).sum::<f64>().abs();

    Ok(LatticeEvaluation {
        raw,
        normalized,
        probability_sum_raw,
        utility_sum_raw,
        alternation_defect_raw,
        resolution_defect: unity.defect,
    })
}

/// Evaluate many scenario pairs at once. Fans out on rayon when the
/// `parallel` feature is enabled; output order always matches input order.
pub fn evaluate_lattice_batch(
    pairs: &[(DensityOperator, ProspectLattice)],
    tol: &Tolerance,
) -> Vec<Result<LatticeEvaluation>> {
    crate::par::map_indexed(pairs.len(), |i| evaluate_lattice(&pairs[i].0, &pairs[i].1, tol))
}

/// One output row of a prediction.
#[derive(Debug, Clone)]
pub struct PredictionRow {
    pub label: String,
    pub utility_factor: f64,
    /// Attraction factor after information decay.
    pub attraction_factor: f64,
    pub probability: f64,
    /// 1-based rank by descending probability (most preferable first).
    pub rank_by_p: usize,
    /// 1-based rank by descending utility factor (most useful first).
    pub rank_by_f: usize,
    /// 1-based rank by descending attraction factor (most attractive first).
    pub rank_by_q: usize,
}

/// Prediction over a lattice with diagnostics.
#[derive(Debug, Clone)]
pub struct PredictionReport {
    pub rows: Vec<PredictionRow>,
    /// |Σp − 1|.
    pub normalization_defect: f64,
    /// ‖Σ_n P̂(π_n) − 1‖_F when a quantum state supplied the factors.
    pub resolution_defect: Option<f64>,
    /// Σ of raw probabilities before renormalization, when quantum.
    pub pre_normalization_sum: Option<f64>,
    /// Information level the attraction factors were decayed with.
    pub mu: f64,
    pub mu_c: f64,
}

impl PredictionReport {
    pub fn probabilities(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.probability).collect()
    }
}

fn descending_ranks(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    (0..n)
        .map(|i| {
            1 + values
                .iter()
                .enumerate()
                .filter(|&(j, &v)| v > values[i] || (v == values[i] && j < i))
                .count()
        })
        .collect()
}

fn assemble_report(
    labels: &[String],
    f: &[f64],
    q_decayed: &[f64],
    mu: f64,
    mu_c: f64,
    resolution_defect: Option<f64>,
    pre_normalization_sum: Option<f64>,
) -> Result<PredictionReport> {
    let p: Vec<f64> = f.iter().zip(q_decayed).map(|(a, b)| a + b).collect();
    for (index, &value) in p.iter().enumerate() {
        if !(-1e-12..=1.0 + 1e-12).contains(&value) {
            return Err(Error::PriorIncompatible { index, value });
        }
    }
    for (index, &value) in q_decayed.iter().enumerate() {
        if value.abs() > 1.0 + 1e-12 {
            return Err(Error::Invalid(format!(
                "attraction factor q[{index}] = {value} outside [-1, 1]"
            )));
        }
    }
    let rank_p = descending_ranks(&p);
    let rank_f = descending_ranks(f);
    let rank_q = descending_ranks(q_decayed);
    let rows = labels
        .iter()
        .enumerate()
        .map(|(i, label)| PredictionRow {
            label: label.clone(),
            utility_factor: f[i],
            attraction_factor: q_decayed[i],
            probability: p[i],
            rank_by_p: rank_p[i],
            rank_by_f: rank_f[i],
            rank_by_q: rank_q[i],
        })
        .collect();
    Ok(PredictionReport {
        rows,
        normalization_defect: (p.iter().sum::<f64>() - 1.0).abs(),
        resolution_defect,
        pre_normalization_sum,
        mu,
        mu_c,
    })
}

/// Predict prospect probabilities from utility and attraction inputs:
/// p_n = f_n + q_n·e^(−μ/μ_c).
pub fn predict(
    lattice: &ProspectLattice,
    utility: &UtilitySpec,
    attraction: &AttractionSpec,
    tol: &Tolerance,
) -> Result<PredictionReport> {
    let n = lattice.len();
    let f = utility_factors(utility, tol)?;
    if f.len() != n {
        return Err(Error::Invalid(format!("{} utility values for {n} prospects", f.len())));
    }
    let q0 = match attraction.mode {
        AttractionMode::QuarterLawPrior => {
            let signs = attraction
                .signs
                .as_ref()
                .ok_or_else(|| Error::Invalid("quarter-law prior needs signs".into()))?;
            attraction_prior(n, signs)?
        }
        AttractionMode::Explicit => {
            let magnitudes = attraction
                .magnitudes
                .as_ref()
                .ok_or_else(|| Error::Invalid("explicit attraction needs magnitudes".into()))?;
            if magnitudes.len() != n {
                return Err(Error::Invalid(format!(
                    "{} attraction values for {n} prospects",
                    magnitudes.len()
                )));
            }
            let q: Vec<f64> = match &attraction.signs {
                Some(signs) => {
                    if signs.len() != n || signs.iter().any(|s| *s != 1 && *s != -1) {
                        return Err(Error::Invalid("signs must be ±1, one per prospect".into()));
                    }
                    magnitudes
                        .iter()
                        .zip(signs)
                        .map(|(m, &s)| m.abs() * s as f64)
                        .collect()
                }
                None => magnitudes.clone(),
            };
            let sum: f64 = q.iter().sum();
            if sum.abs() > 1e-9 {
                return Err(Error::AlternationUnsatisfiable(format!(
                    "explicit attraction factors sum to {sum:.3e}"
                )));
            }
            if q.iter().any(|v| v.abs() > 1.0) {
                return Err(Error::Invalid("attraction factors must lie in [-1, 1]".into()));
            }
            q
        }
        AttractionMode::FromQuantumState => {
            return Err(Error::Invalid(
                "state-driven attraction requires a quantum lattice; use predict_from_state".into(),
            ));
        }
    };
    let q = decay_attraction(&q0, attraction.mu, attraction.mu_c)?;
    assemble_report(lattice.labels(), &f, &q, attraction.mu, attraction.mu_c, None, None)
}

/// Predict from a quantum state: renormalized lattice decomposition followed
/// by information decay of the attraction factors.
pub fn predict_from_state(
    rho_ab: &DensityOperator,
    lattice: &ProspectLattice,
    mu: f64,
    mu_c: f64,
    tol: &Tolerance,
) -> Result<PredictionReport> {
    let eval = evaluate_lattice(rho_ab, lattice, tol)?;
    let f: Vec<f64> = eval.normalized.iter().map(|d| d.utility_factor).collect();
    let q0: Vec<f64> = eval.normalized.iter().map(|d| d.attraction_factor).collect();
    let q = decay_attraction(&q0, mu, mu_c)?;
    assemble_report(
        lattice.labels(),
        &f,
        &q,
        mu,
        mu_c,
        Some(eval.resolution_defect),
        Some(eval.probability_sum_raw),
    )
}

/// Information level at which the two-prospect preference ordering flips.
///
/// Solves f₁ + q₁e^(−μ/μ_c) = f₂ + q₂e^(−μ/μ_c): a reversal exists at
/// μ* = μ_c·ln[(q₁−q₂)/(f₂−f₁)] whenever that logarithm's argument exceeds
/// one; otherwise the preference and utility orderings already agree and
/// nothing flips.
pub fn preference_reversal_threshold(
    f: [f64; 2],
    q: [f64; 2],
    mu_c: f64,
) -> Result<Option<f64>> {
    if mu_c <= 0.0 || !mu_c.is_finite() {
        return Err(Error::Invalid(format!("critical information must be positive, got {mu_c}")));
    }
    if q[0] == q[1] {
        return Err(Error::DegenerateAttraction);
    }
    if f[0] == f[1] {
        // p-gap shrinks monotonically to zero without crossing
        return Ok(None);
    }
    let argument = (q[0] - q[1]) / (f[1] - f[0]);
    if argument.is_finite() && argument > 1.0 {
        Ok(Some(mu_c * argument.ln()))
    } else {
        Ok(None)
    }
}

/// A ready-to-run prediction scenario: labels, factor inputs and optional
/// empirical targets to compare against.
#[derive(Debug, Clone)]
pub struct PredictionScenario {
    pub labels: Vec<String>,
    pub utility: UtilitySpec,
    pub attraction: AttractionSpec,
    pub empirical: Option<Vec<f64>>,
}

impl PredictionScenario {
    pub fn lattice(&self) -> Result<ProspectLattice> {
        ProspectLattice::abstract_lattice(self.labels.clone())
    }
}

/// The built-in prisoner-dilemma lattice: choosing to cooperate or defect
/// without knowing the co-player's action. Utility factors (0.60, 0.40),
/// quarter-law prior with signs (−, +), empirical targets (0.37, 0.63).
/// Prediction yields (0.35, 0.65): the more useful prospect is the less
/// attractive one, and loses.
pub fn prisoner_dilemma_scenario() -> PredictionScenario {
    PredictionScenario {
        labels: vec![
            "cooperate-under-uncertainty".to_string(),
            "defect-under-uncertainty".to_string(),
        ],
        utility: UtilitySpec::direct(vec![0.60, 0.40]),
        attraction: AttractionSpec::quarter_law(vec![-1, 1]),
        empirical: Some(vec![0.37, 0.63]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::InconclusiveEvent;
    use crate::random::Prng;
    use crate::state::{pure_density, HilbertSpace, StateVector};
    use crate::C64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn qubit() -> HilbertSpace {
        HilbertSpace::new(2).unwrap()
    }

    #[test]
    fn utility_factor_normalization() {
        let f = utility_factors(&UtilitySpec::utilities(vec![3.0, 1.0]), &tol()).unwrap();
        assert_eq!(f, vec![0.75, 0.25]);
        let f = utility_factors(&UtilitySpec::direct(vec![0.6, 0.4]), &tol()).unwrap();
        assert_eq!(f, vec![0.6, 0.4]);
        let f = utility_factors(&UtilitySpec::utilities(vec![1.0; 4]), &tol()).unwrap();
        assert_eq!(f, vec![0.25; 4]);
        assert!(utility_factors(&UtilitySpec::utilities(vec![0.0, 0.0]), &tol()).is_err());
        assert!(utility_factors(&UtilitySpec::direct(vec![0.6, 0.3]), &tol()).is_err());
    }

    #[test]
    fn quarter_law_prior_examples() {
        assert_eq!(attraction_prior(2, &[-1, 1]).unwrap(), vec![-0.25, 0.25]);
        assert_eq!(
            attraction_prior(4, &[1, 1, -1, -1]).unwrap(),
            vec![0.25, 0.25, -0.25, -0.25]
        );
        // N=3: solve mean |q| = 1/4 and Σq = 0 for group constants
        let q = attraction_prior(3, &[1, -1, -1]).unwrap();
        assert_eq!(q, vec![0.375, -0.1875, -0.1875]);
        let mean_abs: f64 = q.iter().map(|v| v.abs()).sum::<f64>() / 3.0;
        assert!((mean_abs - 0.25).abs() < 1e-15);
        assert!(q.iter().sum::<f64>().abs() < 1e-15);
    }

    #[test]
    fn quarter_law_prior_rejects_uniform_signs() {
        let err = attraction_prior(3, &[1, 1, 1]).unwrap_err();
        assert!(err.to_string().contains("alternation law unsatisfiable"));
        assert!(attraction_prior(2, &[-1, -1]).is_err());
    }

    #[test]
    fn quarter_law_mean_magnitude_is_exact() {
        let mut rng = Prng::new(90);
        for _ in 0..50 {
            let n = 2 + rng.below(6);
            let mut signs: Vec<i8> = (0..n).map(|_| if rng.uniform() < 0.5 { -1 } else { 1 }).collect();
            // force both signs present
            signs[0] = 1;
            signs[n - 1] = -1;
            let q = attraction_prior(n, &signs).unwrap();
            let mean_abs: f64 = q.iter().map(|v| v.abs()).sum::<f64>() / n as f64;
            // exact up to summation rounding (odd group sizes cost an ulp)
            assert!(
                (mean_abs - 0.25).abs() <= 4.0 * f64::EPSILON,
                "quarter law violated: {mean_abs}"
            );
            assert!(q.iter().sum::<f64>().abs() < 1e-15);
        }
    }

    #[test]
    fn decay_examples() {
        let q = vec![-0.25, 0.25];
        assert_eq!(decay_attraction(&q, 0.0, 1.0).unwrap(), q);
        let far = decay_attraction(&q, 60.0, 1.0).unwrap();
        assert!(far.iter().all(|v| v.abs() < 1e-20));
        let one = decay_attraction(&q, 1.0, 1.0).unwrap();
        assert!((one[0] + 0.25 / std::f64::consts::E).abs() < 1e-15);
        assert!(decay_attraction(&q, 1.0, 0.0).is_err());
    }

    #[test]
    fn prisoner_dilemma_reproduction() {
        let scenario = prisoner_dilemma_scenario();
        let report = predict(
            &scenario.lattice().unwrap(),
            &scenario.utility,
            &scenario.attraction,
            &tol(),
        )
        .unwrap();
        let p = report.probabilities();
        assert!((p[0] - 0.35).abs() < 1e-12);
        assert!((p[1] - 0.65).abs() < 1e-12);
        assert!(report.normalization_defect < 1e-12);
        // empirical deviation is 0.02
        let empirical = scenario.empirical.unwrap();
        let dev = p
            .iter()
            .zip(&empirical)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!((dev - 0.02).abs() < 1e-12);
        // the more useful prospect is less preferable
        assert_eq!(report.rows[0].rank_by_f, 1);
        assert_eq!(report.rows[0].rank_by_p, 2);
        assert_eq!(report.rows[1].rank_by_p, 1);
        // utility factors recover from the predicted values: f = p − q
        assert!((report.rows[0].probability - report.rows[0].attraction_factor - 0.60).abs() < 1e-12);
        assert!((report.rows[1].probability - report.rows[1].attraction_factor - 0.40).abs() < 1e-12);
    }

    #[test]
    fn classical_reduction_when_attraction_vanishes() {
        let lattice =
            ProspectLattice::abstract_lattice(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let utility = UtilitySpec::direct(vec![0.5, 0.3, 0.2]);
        let attraction = AttractionSpec::explicit(vec![0.0, 0.0, 0.0]);
        let report = predict(&lattice, &utility, &attraction, &tol()).unwrap();
        assert_eq!(report.probabilities(), vec![0.5, 0.3, 0.2]);
    }

    #[test]
    fn decay_on_prisoner_dilemma() {
        let scenario = prisoner_dilemma_scenario();
        let attraction = scenario.attraction.clone().with_information(5.0_f64.ln(), 1.0);
        let report = predict(
            &scenario.lattice().unwrap(),
            &scenario.utility,
            &attraction,
            &tol(),
        )
        .unwrap();
        let p = report.probabilities();
        assert!((p[0] - 0.55).abs() < 1e-12, "p0 = {}", p[0]);
        assert!((p[1] - 0.45).abs() < 1e-12, "p1 = {}", p[1]);
    }

    #[test]
    fn decay_restores_utility_ordering() {
        let scenario = prisoner_dilemma_scenario();
        let attraction = scenario.attraction.clone().with_information(50.0, 1.0);
        let report = predict(
            &scenario.lattice().unwrap(),
            &scenario.utility,
            &attraction,
            &tol(),
        )
        .unwrap();
        for row in &report.rows {
            assert_eq!(row.rank_by_p, row.rank_by_f);
        }
    }

    #[test]
    fn incompatible_prior_is_rejected() {
        let lattice = ProspectLattice::abstract_lattice(vec!["a".into(), "b".into()]).unwrap();
        let utility = UtilitySpec::direct(vec![0.9, 0.1]);
        // +0.25 on the first prospect pushes p above 1
        let attraction = AttractionSpec::quarter_law(vec![1, -1]);
        let err = predict(&lattice, &utility, &attraction, &tol()).unwrap_err();
        assert!(err.to_string().contains("prior incompatible"));
    }

    #[test]
    fn explicit_attraction_validation() {
        let lattice = ProspectLattice::abstract_lattice(vec!["a".into(), "b".into()]).unwrap();
        let utility = UtilitySpec::direct(vec![0.5, 0.5]);
        assert!(predict(
            &lattice,
            &utility,
            &AttractionSpec::explicit(vec![0.1, 0.1]),
            &tol()
        )
        .is_err());
        let ok = predict(
            &lattice,
            &utility,
            &AttractionSpec::explicit(vec![0.1, -0.1]),
            &tol(),
        )
        .unwrap();
        assert_eq!(ok.probabilities(), vec![0.6, 0.4]);
    }

    #[test]
    fn reversal_threshold_examples() {
        // prisoner dilemma: reversal at ln 2.5
        let mu = preference_reversal_threshold([0.60, 0.40], [-0.25, 0.25], 1.0)
            .unwrap()
            .unwrap();
        assert!((mu - 2.5_f64.ln()).abs() < 1e-12);

        // equal utilities: no crossing
        assert!(preference_reversal_threshold([0.5, 0.5], [-0.25, 0.25], 1.0)
            .unwrap()
            .is_none());

        // agreeing orderings: no reversal possible
        assert!(preference_reversal_threshold([0.60, 0.40], [0.25, -0.25], 1.0)
            .unwrap()
            .is_none());

        // degenerate attraction
        assert!(matches!(
            preference_reversal_threshold([0.6, 0.4], [0.1, 0.1], 1.0),
            Err(Error::DegenerateAttraction)
        ));
    }

    #[test]
    fn reversal_threshold_against_bisection_oracle() {
        let (f, q) = ([0.60, 0.40], [-0.25, 0.25]);
        let mu_star = preference_reversal_threshold(f, q, 1.0).unwrap().unwrap();
        // bisection on the p-gap
        let gap = |mu: f64| (f[0] + q[0] * (-mu).exp()) - (f[1] + q[1] * (-mu).exp());
        let (mut lo, mut hi) = (0.0_f64, 50.0_f64);
        assert!(gap(lo) < 0.0 && gap(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gap(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((mu_star - 0.5 * (lo + hi)).abs() < 1e-9);
    }

    fn uniform_prospect(space_a: &HilbertSpace, n: usize, db: usize) -> Prospect {
        let inv = 1.0 / (db as f64).sqrt();
        let space_b = HilbertSpace::new(db).unwrap();
        Prospect::new(
            space_a.clone(),
            n,
            InconclusiveEvent::new(space_b, vec![c(inv, 0.0); db], &tol()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn attraction_from_state_aligned_pure_state() {
        let inv = 1.0 / 2.0_f64.sqrt();
        let space = qubit().tensor(&qubit()).unwrap();
        let psi = StateVector::new(space, vec![c(inv, 0.0), c(inv, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let rho = pure_density(&psi);
        let lattice = ProspectLattice::quantum(
            vec!["pi0".into(), "pi1".into()],
            vec![uniform_prospect(&qubit(), 0, 2), uniform_prospect(&qubit(), 1, 2)],
        )
        .unwrap();
        let out = attraction_from_state(&rho, &lattice, &tol()).unwrap();
        // trace oracle: q(π0) = ½, q(π1) = 0 for this state
        assert!((out.q[0] - 0.5).abs() < 1e-14);
        assert!(out.q[1].abs() < 1e-14);
        assert!((out.alternation_defect - 0.5).abs() < 1e-14);
        assert!(out.resolution_defect > 1.0, "shared rank-one P_B cannot resolve unity");
    }

    #[test]
    fn lattice_evaluation_normalizes_both_measures() {
        let rng = Prng::new(91);
        for trial in 0..20u64 {
            let mut local = rng.fork(trial);
            let da = 2 + local.below(3);
            let db = 2 + local.below(3);
            let space_a = HilbertSpace::new(da).unwrap();
            let space_b = HilbertSpace::new(db).unwrap();
            let space = space_a.tensor(&space_b).unwrap();
            let rho = DensityOperator::random(space, &mut local);
            let prospects: Vec<Prospect> = (0..da)
                .map(|n| {
                    Prospect::new(
                        space_a.clone(),
                        n,
                        InconclusiveEvent::new(
                            space_b.clone(),
                            crate::random::state_vector(&mut local, db),
                            &tol(),
                        )
                        .unwrap(),
                    )
                    .unwrap()
                })
                .collect();
            let labels: Vec<String> = (0..da).map(|n| format!("pi{n}")).collect();
            let lattice = ProspectLattice::quantum(labels, prospects).unwrap();
            let eval = evaluate_lattice(&rho, &lattice, &tol()).unwrap();
            let sum_p: f64 = eval.normalized.iter().map(|d| d.total).sum();
            let sum_q: f64 = eval.normalized.iter().map(|d| d.attraction_factor).sum();
            assert!((sum_p - 1.0).abs() < 1e-12);
            assert!(sum_q.abs() < 1e-12, "alternation after renormalization, got {sum_q}");
            for d in &eval.normalized {
                assert_eq!(d.total, d.utility_factor + d.attraction_factor);
                assert!(d.total >= -1e-12 && d.total <= 1.0 + 1e-12);
                assert!(d.attraction_factor.abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn predict_from_state_decays_and_normalizes() {
        let inv = 1.0 / 2.0_f64.sqrt();
        let space = qubit().tensor(&qubit()).unwrap();
        let psi = StateVector::new(space, vec![c(0.5, 0.0), c(0.5, 0.0), c(inv, 0.0), c(0.0, 0.0)])
            .unwrap();
        let rho = pure_density(&psi);
        let lattice = ProspectLattice::quantum(
            vec!["pi0".into(), "pi1".into()],
            vec![uniform_prospect(&qubit(), 0, 2), uniform_prospect(&qubit(), 1, 2)],
        )
        .unwrap();
        let report = predict_from_state(&rho, &lattice, 0.0, 1.0, &tol()).unwrap();
        assert!(report.normalization_defect < 1e-12);
        assert!(report.resolution_defect.is_some());
        assert!(report.pre_normalization_sum.is_some());
        let q_sum: f64 = report.rows.iter().map(|r| r.attraction_factor).sum();
        assert!(q_sum.abs() < 1e-12);

        // large information recovers the utility ordering
        let classical = predict_from_state(&rho, &lattice, 60.0, 1.0, &tol()).unwrap();
        for row in &classical.rows {
            assert_eq!(row.rank_by_p, row.rank_by_f);
        }
    }

    #[test]
    fn ranks_are_permutations_with_index_tie_break() {
        let ranks = descending_ranks(&[0.3, 0.3, 0.4]);
        assert_eq!(ranks, vec![2, 3, 1]);
    }

    #[test]
    fn batch_evaluation_matches_single_calls() {
        let mut rng = Prng::new(92);
        let pairs: Vec<(DensityOperator, ProspectLattice)> = (0..8)
            .map(|_| {
                let rho = DensityOperator::random(qubit().tensor(&qubit()).unwrap(), &mut rng);
                let lattice = ProspectLattice::quantum(
                    vec!["pi0".into(), "pi1".into()],
                    vec![uniform_prospect(&qubit(), 0, 2), uniform_prospect(&qubit(), 1, 2)],
                )
                .unwrap();
                (rho, lattice)
            })
            .collect();
        let batch = evaluate_lattice_batch(&pairs, &tol());
        assert_eq!(batch.len(), pairs.len());
        for ((rho, lattice), result) in pairs.iter().zip(&batch) {
            let single = evaluate_lattice(rho, lattice, &tol()).unwrap();
            let got = result.as_ref().unwrap();
            for (a, b) in single.normalized.iter().zip(&got.normalized) {
                assert_eq!(a.total.to_bits(), b.total.to_bits());
            }
        }
    }
}
