//! Production–destruction models: the linear Metzler class with its
//! `S⁺ − S⁻` split, general models given by production terms and destruction
//! rates, steady states under linear invariants, and model-file ingestion.

mod builtins;
mod general;
mod linear;
mod model_file;

use thiserror::Error;

use crate::linalg::{LinalgError, Matrix};

pub use builtins::{paper_2x2, paper_5x5, paper_stiff, perturbation_direction_5x5, Builtin};
pub use general::GeneralPds;
pub use linear::{split_metzler, steady_state_for, LinearPds};
pub use model_file::{parse_model, ModelDocument, ModelKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PdsError {
    #[error("matrix is not Metzler: entry ({row}, {col}) = {value} is negative")]
    NotMetzler { row: usize, col: usize, value: f64 },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invariant system is singular: {0}")]
    Singular(String),
    #[error("model contract violated: {0}")]
    Contract(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Common interface of the models consumed by the step maps.
pub trait Pds {
    fn dim(&self) -> usize;

    /// `f(y) = f^[P](y) − f^[D](y)`.
    fn rhs(&self, y: &[f64]) -> Vec<f64>;

    /// `Σ_j f^[D]_j(y) / y_j`, the sum entering the GeCo step-size modulation.
    fn destruction_rate_sum(&self, y: &[f64]) -> Result<f64, PdsError>;

    /// Rows `n` with `nᵀf(y) = 0` for all `y`, stacked as a k×N matrix.
    fn invariant_rows(&self) -> Option<&Matrix> {
        None
    }

    fn as_linear(&self) -> Option<&LinearPds> {
        None
    }
}
