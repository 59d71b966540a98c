//! Small dense real linear algebra: eigenvalues, kernels, matrix exponential
//! action and structural checks for Metzler systems.
//!
//! Everything here is a pure function of its inputs.

mod eigen;
mod expm;
mod matrix;
mod nullspace;
mod validate;

use thiserror::Error;

pub use eigen::{eigenvalues, Spectrum, MAX_DIM};
pub use expm::{expm, expm_apply};
pub use matrix::{lu_solve, vec_dot, vec_norm_inf, Matrix};
pub use nullspace::{kernel_residual, left_nullspace, nullspace, DEFAULT_RANK_TOL};
pub use validate::{metzler_disk_check, validate_system, SystemReport, SPECTRUM_ZERO_TOL};

pub use num_complex::Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("non-finite matrix or vector entry")]
    NonFinite,
    #[error("QR iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },
    #[error("matrix is numerically singular")]
    Singular,
    #[error("matrix exponential overflowed")]
    Overflow,
    #[error("{0}")]
    Domain(String),
}
