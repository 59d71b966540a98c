//! Unconditionally positive, linear-invariant-preserving time integrators for
//! production–destruction systems, with a stability toolkit for their fixed
//! points.
//!
//! * [`linalg`]: eigenvalues, kernels, matrix exponential action.
//! * [`pds`]: linear and general production–destruction models.
//! * [`integrators`]: GeCo1/GeCo2, gBBKS1/gBBKS2(α), Euler/Heun baselines.
//! * [`stability`]: stability functions, critical step sizes, Jacobians.
//! * [`cli`]: the command-line front end and experiment recipes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod integrators;
pub mod linalg;
pub mod pds;
pub mod stability;
