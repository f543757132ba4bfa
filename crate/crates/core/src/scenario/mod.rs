//! Path-level capacities under product selections: common-random-number
//! sampling, a greedy selection search, an exact enumeration oracle for
//! small discrete models, the convergence experiment and the proof-chain
//! check.
//!
//! A path law is one member per coordinate, drawn independently. Path
//! capacities are maxima over these product laws only.

pub mod brute_force;
pub mod event;
pub mod experiment;
pub mod proof_chain;
pub mod rng;
pub mod search;

pub use brute_force::{brute_force_capacity, ExactCapacity, ENUMERATION_CAP};
pub use event::{EventKind, PathEvent, PathPredicate, ScenarioSelection, THRESHOLD_SLACK};
pub use experiment::{convergence_experiment, write_convergence_csv, ConvergenceReport, ConvergenceRow};
pub use proof_chain::{proof_chain_check, write_proof_chain_csv, BoundRow, ProofChainReport, PROOF_SLACK};
pub use search::{
    estimate_capacity_lower, estimate_capacity_upper, event_probability_under, sample_path, CapacityEstimate,
    EstimateBudget, EventEstimate,
};
