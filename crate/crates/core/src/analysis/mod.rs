//! Convergence analysis of exact and inexact two-grid methods.

pub mod conditions;
pub mod exact;
pub mod inexact;
pub mod report;

pub use conditions::{check_conditions, ConditionReport};
pub use exact::{
    delta_tg, exact_factor, exact_two_sided, f_tg, seminorm_oracle, sigma_tg, smoother_floor,
    DeltaReport, ExactFactorReport, Iteration,
};
pub use inexact::{
    beta, btilde_pinv, check_range, f_itg, general_epsilon_bound, inexact_linear_analysis,
    spectral_equivalence, BoundInputs, InexactFactorReport, SpectralEquivalence,
};
pub use report::{analyze, CoarseAnalysis, ConvergenceReport};
