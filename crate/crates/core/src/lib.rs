//! Exact computations with R-matrices, K-matrices and boundary transfer
//! matrices for quantum sl2 and its affinization.

pub mod cartan;
pub mod kmatrix;
pub mod linalg;
pub mod qsp;
pub mod reps;
pub mod rmatrix;
pub mod scalar;
pub mod transfer;

pub use linalg::{LinalgError, Matrix};
pub use scalar::{Rat, Scalar, ScalarError, Var};
