//! Step maps of the positive, linear-invariant-preserving schemes and the
//! trajectory driver.
//!
//! | id       | order | positive for all `Δt` | stage structure                    |
//! |----------|-------|-----------------------|------------------------------------|
//! | `euler`  | 1     | no                    | `y + Δt f(y)`                      |
//! | `heun`   | 2     | no                    | two-stage, weights `(1/2, 1/2)`    |
//! | `geco1`  | 1     | yes                   | `y + Δt φ(Δt Σ d) f(y)`            |
//! | `geco2`  | 2     | yes                   | GeCo1 stage plus `w`-weighted step |
//! | `gbbks1` | 1     | yes                   | Euler times a product term `τ`     |
//! | `gbbks2` | 2     | yes                   | two-stage, each with its own `τ`   |

mod phi;
mod steps;
mod strategy;
mod tau;
mod trajectory;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::pds::{Pds, PdsError};

pub use phi::phi;
pub use strategy::{Bbks, GbbksStrategy};
pub use tau::{solve_tau, tau_residual, TauSolution, TAU_MAX_ITER, TAU_RESIDUAL_TOL};
pub use trajectory::{integrate, Aborted, Trajectory};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegratorError {
    #[error("{0}")]
    Domain(String),
    #[error("strategy returned sigma[{index}] = {value}, which is not positive")]
    NonPositiveSigma { index: usize, value: f64 },
    #[error("product-term bisection did not converge; best bracket [{lo}, {hi}]")]
    TauNoConvergence { lo: f64, hi: f64 },
    #[error("non-finite value in component {index}")]
    NonFinite { index: usize },
    #[error(transparent)]
    Model(#[from] PdsError),
}

/// Result of one application of a step map.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub next_state: Vec<f64>,
    /// Product term of the final stage; 1 when no component is active or the
    /// scheme has none.
    pub tau: f64,
    /// Product term of the inner stage of two-stage schemes.
    pub stage_tau: Option<f64>,
    /// Arguments passed to `φ`, in evaluation order.
    pub phi_args: Vec<f64>,
    pub warnings: Vec<String>,
}

impl StepOutcome {
    fn plain(next_state: Vec<f64>) -> Self {
        Self {
            next_state,
            tau: 1.0,
            stage_tau: None,
            phi_args: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeId {
    Euler,
    Heun,
    Geco1,
    Geco2,
    Gbbks1,
    Gbbks2,
}

impl SchemeId {
    pub const ALL: [SchemeId; 6] = [
        SchemeId::Euler,
        SchemeId::Heun,
        SchemeId::Geco1,
        SchemeId::Geco2,
        SchemeId::Gbbks1,
        SchemeId::Gbbks2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SchemeId::Euler => "euler",
            SchemeId::Heun => "heun",
            SchemeId::Geco1 => "geco1",
            SchemeId::Geco2 => "geco2",
            SchemeId::Gbbks1 => "gbbks1",
            SchemeId::Gbbks2 => "gbbks2",
        }
    }

    pub fn order(&self) -> u32 {
        match self {
            SchemeId::Euler | SchemeId::Geco1 | SchemeId::Gbbks1 => 1,
            SchemeId::Heun | SchemeId::Geco2 | SchemeId::Gbbks2 => 2,
        }
    }

    pub fn is_positivity_preserving(&self) -> bool {
        !matches!(self, SchemeId::Euler | SchemeId::Heun)
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = IntegratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "euler" => Ok(SchemeId::Euler),
            "heun" => Ok(SchemeId::Heun),
            "geco1" => Ok(SchemeId::Geco1),
            "geco2" => Ok(SchemeId::Geco2),
            "gbbks1" | "bbks1" => Ok(SchemeId::Gbbks1),
            "gbbks2" | "bbks2" => Ok(SchemeId::Gbbks2),
            other => Err(IntegratorError::Domain(format!("unknown scheme '{other}'"))),
        }
    }
}

/// A scheme together with its parameters.
#[derive(Clone, Debug)]
pub struct SchemeSpec {
    id: SchemeId,
    alpha: f64,
    strategy: Arc<dyn GbbksStrategy>,
}

impl SchemeSpec {
    /// Default parameters: `α = 1` and the BBKS presets for gBBKS.
    pub fn new(id: SchemeId) -> Self {
        Self {
            id,
            alpha: 1.0,
            strategy: Arc::new(Bbks),
        }
    }

    pub fn euler() -> Self {
        Self::new(SchemeId::Euler)
    }

    pub fn heun() -> Self {
        Self::new(SchemeId::Heun)
    }

    pub fn geco1() -> Self {
        Self::new(SchemeId::Geco1)
    }

    pub fn geco2() -> Self {
        Self::new(SchemeId::Geco2)
    }

    pub fn bbks1() -> Self {
        Self::new(SchemeId::Gbbks1)
    }

    /// BBKS2(α); fails for `α < 1/2`.
    pub fn bbks2(alpha: f64) -> Result<Self, IntegratorError> {
        Self::new(SchemeId::Gbbks2).with_alpha(alpha)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self, IntegratorError> {
        if !(alpha >= 0.5) || !alpha.is_finite() {
            return Err(IntegratorError::Domain(format!(
                "alpha must be at least 1/2, got {alpha}"
            )));
        }
        self.alpha = alpha;
        Ok(self)
    }

    pub fn with_strategy(mut self, strategy: Arc<dyn GbbksStrategy>) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn id(&self) -> SchemeId {
        self.id
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn strategy(&self) -> &dyn GbbksStrategy {
        self.strategy.as_ref()
    }

    /// Apply one step of size `dt` to `y`.
    pub fn step(
        &self,
        model: &dyn Pds,
        y: &[f64],
        dt: f64,
    ) -> Result<StepOutcome, IntegratorError> {
        match self.id {
            SchemeId::Euler => steps::euler(model, y, dt),
            SchemeId::Heun => steps::heun(model, y, dt),
            SchemeId::Geco1 => steps::geco1(model, y, dt),
            SchemeId::Geco2 => steps::geco2(model, y, dt),
            SchemeId::Gbbks1 => steps::gbbks1(model, y, dt, self.strategy()),
            SchemeId::Gbbks2 => steps::gbbks2(model, y, dt, self.alpha, self.strategy()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_names_round_trip() {
        for id in SchemeId::ALL {
            assert_eq!(id.name().parse::<SchemeId>().unwrap(), id);
        }
        assert_eq!("BBKS1".parse::<SchemeId>().unwrap(), SchemeId::Gbbks1);
        assert!("rk4".parse::<SchemeId>().is_err());
    }

    #[test]
    fn alpha_constraint() {
        assert!(SchemeSpec::bbks2(0.4).is_err());
        assert!(SchemeSpec::bbks2(0.5).is_ok());
        assert!(SchemeSpec::bbks2(f64::NAN).is_err());
    }
}
