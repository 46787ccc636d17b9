//! Smoothers, two-grid hierarchies and SPSD test problems.

pub mod hierarchy;
pub mod problem;
pub mod smoother;

pub use hierarchy::{aggregation_prolongation, build_hierarchy, TwoGridHierarchy};
pub use problem::{generate_problem, parse_edge_list, seeded_vector, Edge, Problem, ProblemSpec};
pub use smoother::{build_smoother, jacobi_omega_limit, mbar, mtilde, SmootherSpec};
