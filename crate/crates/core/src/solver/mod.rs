//! Two-grid iterations: exact, symmetrized and inexact sweeps, and traced runs.

pub mod perturb;
pub mod sweep;
pub mod trace;

pub use perturb::{EpsilonPerturbedSolver, PerturbDirection};
pub use sweep::{
    check_consistent, itg_sweep, relative_coarse_error, restricted_residual, seminorm, stg_sweep,
    tg_sweep, CoarseSolve, CoarseSolverSpec, SweepOutcome, Variant,
};
pub use trace::{iterate, IterationTrace, TraceSummary};
