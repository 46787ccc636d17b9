pub mod analysis;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod linalg;
pub mod model;
pub mod solver;

pub use error::{Error, Result};
