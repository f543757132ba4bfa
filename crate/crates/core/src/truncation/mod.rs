//! Smooth truncation, truncated means, the tail functionals `gamma_hat` and
//! `psi_n`, and checkers for the hypotheses of the weak law.

pub mod conditions;
pub mod correlation;
pub mod cutoff;
pub mod means;
pub mod model;
pub mod psi;

pub use conditions::{
    check_psi_vanishes, check_uniform_integrability, kolmogorov_condition, psi_verdict, KolmogorovVerdict,
    PsiVerdict, UiVerdict,
};
pub use correlation::{cesaro_condition, kappa, CesaroReport};
pub use cutoff::{chi, tilde_chi, truncate, SmoothCutoff};
pub use means::{mu_bounds, truncated_mean_lower, truncated_mean_upper, write_means_csv, TruncatedMeans};
pub use model::{Coordinates, Dependence, JointAtom, JointLaw, JointPairs, SequenceModel};
pub use psi::{
    default_y_grid, gamma_hat, grid_integral, psi, psi_profile, uniform_y_grid, validate_grid, write_psi_csv,
    PsiProfile,
};
