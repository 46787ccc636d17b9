//! Dense kernels: matrices, symmetric eigensolver, SPSD certification, MatrixMarket I/O.

pub mod eigen;
pub mod matrix;
pub mod mtx;
pub mod spsd;

pub use eigen::{sym_eig, SymEigen};
pub use matrix::{add_vec, dot, norm2, scale_vec, sub_vec, DenseMatrix};
pub use spsd::{
    null_intersection_dim, nullity, numerical_rank, range_null_bases, spsd_certify,
    NullityDecision, SpsdOperator, TolerancePolicy,
};
