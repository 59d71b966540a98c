//! Stability functions, critical step sizes, the unconditional-stability
//! certificate for GeCo1, Jacobians of step maps at steady states and the
//! resulting fixed-point verdicts.

mod classify;
mod functions;
mod random;
mod sign_map;

use thiserror::Error;

use crate::integrators::IntegratorError;
use crate::linalg::LinalgError;
use crate::pds::PdsError;

pub use classify::{
    classify_fixed_point, closed_form_jacobian, numerical_jacobian, StabilityReport, Verdict,
    FD_STEP, FD_TOL, KERNEL_WINDOW, VERDICT_TOL,
};
pub use functions::{
    critical_step, geco2_region_endpoint, geco2_remark_r, stability_value,
    unconditional_certificate, Certificate, CriticalStep, RegionEndpoint, CRITICAL_STEP_CAP,
    CRITICAL_STEP_START, CRITICAL_STEP_WIDTH, PAPER_BRACKET,
};
pub use random::{random_system_8, MAX_REJECTIONS};
pub use sign_map::w_vector;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error(transparent)]
    Model(#[from] PdsError),
}
