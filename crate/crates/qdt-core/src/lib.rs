//! Quantum probabilities of elementary, composite and inconclusive events
//! over finite-dimensional Hilbert spaces, the five-channel measurement
//! pipeline, and quantum decision theory (utility factor + attraction
//! factor) predictions over prospect lattices.
//!
//! The crate is layered bottom-up:
//!
//! * [`matrix`] / [`eig`] — dense complex-matrix kernel (Kronecker products,
//!   partial traces, Hermitian eigendecomposition, range bases),
//! * [`state`] — Hilbert spaces, state vectors, density and unitary operators,
//! * [`event`] — event operators and quantum-logic structure (projectors,
//!   join/meet, degeneracy lifting, inconclusive events, prospects),
//! * [`prob`] — probability functionals (elementary, Lüders, Wigner, joint,
//!   marginal, conditional, prospect probability with f/q split),
//! * [`channel`] — the preparation/evolution/measurement channel pipeline and
//!   channel-state duality diagnostics,
//! * [`decision`] — prospect lattices, utility factors, attraction priors and
//!   the prediction engine,
//! * [`verify`] — the runtime invariant suite behind the `verify` command.
//!
//! Batch sweeps (invariant suites, seeded draws) run data-parallel on rayon
//! when the default `parallel` feature is enabled and fall back to plain
//! iterators otherwise.

pub mod channel;
pub mod decision;
pub mod eig;
mod error;
pub mod event;
pub mod matrix;
mod par;
pub mod prob;
pub mod random;
pub mod state;
pub mod verify;

pub use error::Error;
pub use matrix::{ComplexMatrix, Tolerance};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Complex scalar used throughout (double precision).
pub type C64 = num_complex::Complex64;
