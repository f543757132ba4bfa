//! Sublinear expectations over finite ambiguity sets, smooth-truncation
//! diagnostics for the nonlinear weak law of large numbers, and a Monte
//! Carlo engine that estimates path capacities by adversarial search over
//! per-coordinate measure selections.
//!
//! The crate is organized in three layers:
//!
//! * [`nlexp`]: scalar laws, ambiguity sets, `E`, `E_lower`, `V`, `v`, and
//!   the Markov/Chebyshev/axiom checkers.
//! * [`truncation`]: the cutoff `chi_n`, truncated means, the tail
//!   functionals `gamma_hat` and `psi_n`, and the limit-condition surrogates.
//! * [`scenario`]: common-random-number path sampling, capacity search,
//!   exact enumeration oracles, convergence experiments and the
//!   bound-chain check.

pub mod error;
pub mod nlexp;
pub mod scenario;
pub mod truncation;

pub use error::{Error, Result};
pub use nlexp::{AmbiguitySet, Distribution, DistributionKind, IntervalSet, TestFunction};
