use thiserror::Error;

/// Errors for every layer of the crate.
///
/// Message prefixes are stable: callers (and the CLI exit-code mapping)
/// match on them.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("factorization mismatch: {0}")]
    FactorizationMismatch(String),

    #[error("not Hermitian: defect {defect:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("norm violation: {0}")]
    NormViolation(String),

    #[error("not a projector: idempotency defect {0:.3e}")]
    NotProjector(f64),

    #[error("not orthonormal: defect {0:.3e}")]
    NotOrthonormal(f64),

    #[error("conditioning on null event: probability {0:.3e}")]
    NullConditioning(f64),

    #[error("ineffective symmetry breaking: spectral gap {gap:.3e} at nu {nu:.3e}")]
    IneffectiveSymmetryBreaking { gap: f64, nu: f64 },

    #[error("alternation law unsatisfiable: {0}")]
    AlternationUnsatisfiable(String),

    #[error("prior incompatible with utilities: p[{index}] = {value:.6} outside [0,1]")]
    PriorIncompatible { index: usize, value: f64 },

    #[error("degenerate attraction: q1 = q2")]
    DegenerateAttraction,

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("not unitary: defect {0:.3e}")]
    NotUnitary(f64),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}
