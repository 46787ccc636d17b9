use thiserror::Error;

/// Errors raised by the linear-algebra kernels, hierarchy assembly, analysis and solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix must have at least one row and one column, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("data length mismatch: expected {expected} entries, got {got}")]
    InvalidData { expected: usize, got: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric: max |S - S^T| = {asymmetry:e}")]
    NotSymmetric { asymmetry: f64 },

    #[error("dimension mismatch in {context}: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        context: &'static str,
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("vector length mismatch in {context}: expected {expected}, got {got}")]
    LengthMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("Jacobi eigensolver did not converge: off-diagonal residual {residual:e} after {sweeps} sweeps")]
    EigenNoConvergence { residual: f64, sweeps: usize },

    #[error("matrix is not SPSD: eigenvalue {min_eigenvalue:e} below -psd_slack * lambda_max ({threshold:e})")]
    NotSpsd { min_eigenvalue: f64, threshold: f64 },

    #[error("zero matrix is not an admissible SPSD operator")]
    ZeroMatrix,

    #[error("invalid tolerance {name} = {value}: must lie in (0, 1)")]
    InvalidTolerance { name: &'static str, value: f64 },

    #[error("Jacobi weight must be positive, got {omega}")]
    InvalidOmega { omega: f64 },

    #[error(
        "diagonal entry {index} of A is zero; its row and column vanish, so delete them and solve the reduced system"
    )]
    ZeroDiagonal { index: usize },

    #[error("coarse space must be smaller than the fine space: n = {n}, n_c = {nc}")]
    CoarseNotSmaller { n: usize, nc: usize },

    #[error("Galerkin coarse matrix P^T A P vanishes (lambda_max = {lambda_max:e})")]
    ZeroCoarseMatrix { lambda_max: f64 },

    #[error(
        "smoother violates ||I - MA||_A <= 1: A^(1/2) Mbar A^(1/2) has eigenvalue {min_eigenvalue:e}"
    )]
    SmootherAssumption { min_eigenvalue: f64 },

    #[error("inconsistent ranks: rank(A_c) = {s} exceeds rank(A) = {r}")]
    RankInconsistent { r: usize, s: usize },

    #[error(
        "R(B_c) != R(A_c) (required for spectral equivalence): rank(B_c) = {rank_bc}, rank(A_c) = {rank_ac}, shared null dimension {shared_null} of {expected_null}"
    )]
    RangeMismatch {
        rank_bc: usize,
        rank_ac: usize,
        shared_null: usize,
        expected_null: usize,
    },

    #[error(
        "alpha_2 = lambda_max(B_c^+ A_c) = {alpha2} must be < 2; scale B_c by a factor greater than {min_scale}"
    )]
    AlphaTooLarge { alpha2: f64, min_scale: f64 },

    #[error("accuracy parameter eps = {eps} must lie in [0, 1)")]
    InvalidEpsilon { eps: f64 },

    #[error("right-hand side is inconsistent: null-space component {residual:e} exceeds {tolerance:e}")]
    InconsistentRhs { residual: f64, tolerance: f64 },

    #[error("iteration diverged at sweep {sweep}: A-seminorm error grew by {growth:.3e} over 5 sweeps")]
    Diverged { sweep: usize, growth: f64 },

    #[error("number of sweeps must be at least 1")]
    NoSweeps,

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("graph edge ({i}, {j}) has negative weight {weight}")]
    NegativeWeight { i: usize, j: usize, weight: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
