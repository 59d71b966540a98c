use std::fmt;

use super::{IntegratorError, SchemeSpec};
use crate::linalg::Matrix;
use crate::pds::Pds;

/// Iterates of a fixed-step run with per-step diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub states: Vec<Vec<f64>>,
    /// `max_i |n_iᵀyⁿ − n_iᵀy⁰| / |n_iᵀy⁰|` over the invariant rows (absolute
    /// when `n_iᵀy⁰ = 0`); zero when the model declares no invariants.
    pub invariant_defect: Vec<f64>,
    pub min_component: Vec<f64>,
    /// Step index (1-based, the state it produced) and message.
    pub warnings: Vec<(usize, String)>,
}

impl Trajectory {
    fn start(dt: f64, y0: Vec<f64>) -> Self {
        let min = y0.iter().copied().fold(f64::INFINITY, f64::min);
        Self {
            dt,
            states: vec![y0],
            invariant_defect: vec![0.0],
            min_component: vec![min],
            warnings: Vec::new(),
        }
    }

    /// `t_n = n·dt`.
    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("a trajectory holds at least y0")
    }

    pub fn max_invariant_defect(&self) -> f64 {
        self.invariant_defect.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_over_run(&self) -> f64 {
        self.min_component
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// A run that stopped early, with everything computed before the failure.
#[derive(Clone, Debug, PartialEq)]
pub struct Aborted {
    pub partial: Trajectory,
    /// Index of the step that failed (1-based); 0 for rejected inputs.
    pub step: usize,
    pub cause: IntegratorError,
}

impl fmt::Display for Aborted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "integration aborted at step {}: {}",
            self.step, self.cause
        )
    }
}

impl std::error::Error for Aborted {}

fn defect(rows: &Matrix, reference: &[f64], y: &[f64]) -> f64 {
    (0..rows.rows())
        .map(|i| {
            let now: f64 = rows.row(i).iter().zip(y).map(|(n, v)| n * v).sum();
            let d = (now - reference[i]).abs();
            if reference[i] != 0.0 {
                d / reference[i].abs()
            } else {
                d
            }
        })
        .fold(0.0, f64::max)
}

/// Apply `n_steps` steps of `scheme` from `y0`.
pub fn integrate(
    model: &dyn Pds,
    scheme: &SchemeSpec,
    y0: &[f64],
    dt: f64,
    n_steps: usize,
) -> Result<Trajectory, Box<Aborted>> {
    let mut traj = Trajectory::start(dt, y0.to_vec());
    let reject = |traj: Trajectory, cause: IntegratorError| {
        Box::new(Aborted {
            partial: traj,
            step: 0,
            cause,
        })
    };
    if y0.len() != model.dim() {
        let cause = IntegratorError::Domain(format!(
            "y0 has length {}, model has dimension {}",
            y0.len(),
            model.dim()
        ));
        return Err(reject(traj, cause));
    }
    if let Some(i) = y0.iter().position(|v| !v.is_finite()) {
        return Err(reject(traj, IntegratorError::NonFinite { index: i }));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(reject(
            traj,
            IntegratorError::Domain(format!("step size must be finite and positive, got {dt}")),
        ));
    }
    if scheme.id().is_positivity_preserving() {
        if let Some(i) = y0.iter().position(|&v| v < 0.0) {
            let cause = IntegratorError::Domain(format!("y0[{i}] = {} is negative", y0[i]));
            return Err(reject(traj, cause));
        }
    }
    let rows = model
        .invariant_rows()
        .cloned()
        .unwrap_or_else(|| Matrix::zeros(0, y0.len()));
    let reference = rows.mul_vec(y0);
    traj.states.reserve(n_steps);
    for n in 1..=n_steps {
        match scheme.step(model, traj.last(), dt) {
            Ok(out) => {
                traj.warnings
                    .extend(out.warnings.into_iter().map(|w| (n, w)));
                traj.invariant_defect
                    .push(defect(&rows, &reference, &out.next_state));
                traj.min_component
                    .push(out.next_state.iter().copied().fold(f64::INFINITY, f64::min));
                traj.states.push(out.next_state);
            }
            Err(cause) => {
                return Err(Box::new(Aborted {
                    partial: traj,
                    step: n,
                    cause,
                }))
            }
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pds::{steady_state_for, Builtin};

    #[test]
    fn zero_steps_returns_start() {
        let m = Builtin::Paper5x5.model();
        let t = integrate(&m, &SchemeSpec::geco1(), &Builtin::Paper5x5.y0(), 1.0, 0).unwrap();
        assert_eq!(t.states, vec![Builtin::Paper5x5.y0()]);
        assert_eq!(t.time(0), 0.0);
    }

    #[test]
    fn geco1_reaches_steady_state() {
        let b = Builtin::Paper5x5;
        let m = b.model();
        let y_star = steady_state_for(&m, &b.y0()).unwrap();
        // slowest mode contracts by 1 - phi(20)(5 - sqrt 3) = 0.8366 per step
        let t = integrate(&m, &SchemeSpec::geco1(), &b.y0(), 1.0, 150).unwrap();
        let err = t
            .last()
            .iter()
            .zip(&y_star)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
        assert!(t.max_invariant_defect() <= 1e-12);
    }

    #[test]
    fn failure_keeps_partial_run() {
        let m = Builtin::Paper5x5.model();
        let err = integrate(&m, &SchemeSpec::geco1(), &[1.0, 2.0], 1.0, 3).unwrap_err();
        assert_eq!(err.step, 0);
        assert_eq!(err.partial.states.len(), 1);
    }

    #[test]
    fn time_grid_is_multiplicative() {
        let m = Builtin::Paper2x2 {
            a: 1.0,
            b: 1.0,
            c: 1.0,
        }
        .model();
        let t = integrate(&m, &SchemeSpec::euler(), &[2.0, 1.0], 0.1, 30).unwrap();
        assert_eq!(t.time(30), 30.0 * 0.1);
    }
}
