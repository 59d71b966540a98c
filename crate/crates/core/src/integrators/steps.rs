use super::phi::phi_nonneg;
use super::{solve_tau, GbbksStrategy, IntegratorError, StepOutcome};
use crate::pds::Pds;

fn check_inputs(model: &dyn Pds, y: &[f64], dt: f64) -> Result<(), IntegratorError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(IntegratorError::Domain(format!(
            "step size must be finite and positive, got {dt}"
        )));
    }
    if y.len() != model.dim() {
        return Err(IntegratorError::Domain(format!(
            "state has length {}, model has dimension {}",
            y.len(),
            model.dim()
        )));
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(IntegratorError::NonFinite { index: i });
    }
    Ok(())
}

fn check_output(y: &[f64]) -> Result<(), IntegratorError> {
    match y.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(IntegratorError::NonFinite { index: i }),
        None => Ok(()),
    }
}

/// `y_i + h·g_i·τ`, the shared update of Euler/Heun and the gBBKS family.
fn weighted_update(y: &[f64], g: &[f64], h: f64, tau: f64) -> Vec<f64> {
    y.iter().zip(g).map(|(y, g)| y + h * g * tau).collect()
}

/// Product term over the active set `{m : g_m < 0}` for the update
/// `y + h·g·τ` with parameters `σ` and `r`, together with the updated active
/// components `y_m + h·g_m·τ` as delivered by the solver.
struct ProductTerm {
    tau: f64,
    active: Vec<(usize, f64)>,
}

impl ProductTerm {
    fn apply(&self, y: &[f64], g: &[f64], h: f64) -> Vec<f64> {
        let mut next = weighted_update(y, g, h, self.tau);
        for &(m, v) in &self.active {
            next[m] = v;
        }
        next
    }
}

fn product_term(
    y: &[f64],
    g: &[f64],
    h: f64,
    sigma: &[f64],
    r: f64,
) -> Result<ProductTerm, IntegratorError> {
    let active: Vec<usize> = (0..y.len()).filter(|&m| g[m] < 0.0).collect();
    if active.is_empty() {
        return Ok(ProductTerm {
            tau: 1.0,
            active: Vec::new(),
        });
    }
    let c: Vec<f64> = active.iter().map(|&m| y[m]).collect();
    let d: Vec<f64> = active.iter().map(|&m| h * g[m]).collect();
    let s: Vec<f64> = active.iter().map(|&m| sigma[m]).collect();
    if let Some(k) = s.iter().position(|&v| !(v > 0.0)) {
        return Err(IntegratorError::NonPositiveSigma {
            index: active[k],
            value: s[k],
        });
    }
    if let Some(k) = c.iter().position(|&v| !(v > 0.0)) {
        return Err(IntegratorError::Domain(format!(
            "component {} is not positive but has a negative rate",
            active[k]
        )));
    }
    let sol = solve_tau(&c, &d, &s, r)?;
    Ok(ProductTerm {
        tau: sol.tau,
        active: active.into_iter().zip(sol.factors).collect(),
    })
}

pub(crate) fn euler(model: &dyn Pds, y: &[f64], dt: f64) -> Result<StepOutcome, IntegratorError> {
    check_inputs(model, y, dt)?;
    let f = model.rhs(y);
    let next = weighted_update(y, &f, dt, 1.0);
    check_output(&next)?;
    Ok(StepOutcome::plain(next))
}

pub(crate) fn heun(model: &dyn Pds, y: &[f64], dt: f64) -> Result<StepOutcome, IntegratorError> {
    two_stage(model, y, dt, 1.0, None)
}

pub(crate) fn gbbks1(
    model: &dyn Pds,
    y: &[f64],
    dt: f64,
    strategy: &dyn GbbksStrategy,
) -> Result<StepOutcome, IntegratorError> {
    check_inputs(model, y, dt)?;
    let f = model.rhs(y);
    let term = product_term(y, &f, dt, &strategy.sigma_first(y), strategy.r(y))?;
    let next = term.apply(y, &f, dt);
    check_output(&next)?;
    Ok(StepOutcome {
        tau: term.tau,
        ..StepOutcome::plain(next)
    })
}

pub(crate) fn gbbks2(
    model: &dyn Pds,
    y: &[f64],
    dt: f64,
    alpha: f64,
    strategy: &dyn GbbksStrategy,
) -> Result<StepOutcome, IntegratorError> {
    two_stage(model, y, dt, alpha, Some(strategy))
}

/// Two-stage explicit Runge–Kutta step with nodes `(0, α)` and weights
/// `(1 − 1/(2α), 1/(2α))`; with a strategy each stage is multiplied by its
/// gBBKS product term, without one both terms are 1 (Heun for `α = 1`).
fn two_stage(
    model: &dyn Pds,
    y: &[f64],
    dt: f64,
    alpha: f64,
    strategy: Option<&dyn GbbksStrategy>,
) -> Result<StepOutcome, IntegratorError> {
    check_inputs(model, y, dt)?;
    if !(alpha >= 0.5) || !alpha.is_finite() {
        return Err(IntegratorError::Domain(format!(
            "alpha must be at least 1/2, got {alpha}"
        )));
    }
    let f1 = model.rhs(y);
    let inner_h = alpha * dt;
    let stage = match strategy {
        Some(s) => product_term(y, &f1, inner_h, &s.pi(y), s.q(y))?,
        None => ProductTerm {
            tau: 1.0,
            active: Vec::new(),
        },
    };
    let y2 = stage.apply(y, &f1, inner_h);
    check_output(&y2)?;
    let f2 = model.rhs(&y2);
    let w2 = 1.0 / (2.0 * alpha);
    let w1 = 1.0 - w2;
    let blend: Vec<f64> = f1.iter().zip(&f2).map(|(a, b)| w1 * a + w2 * b).collect();
    let outer = match strategy {
        Some(s) => product_term(y, &blend, dt, &s.sigma_second(y, &y2, alpha), s.r(y))?,
        None => ProductTerm {
            tau: 1.0,
            active: Vec::new(),
        },
    };
    let next = outer.apply(y, &blend, dt);
    check_output(&next)?;
    Ok(StepOutcome {
        tau: outer.tau,
        stage_tau: Some(stage.tau),
        ..StepOutcome::plain(next)
    })
}

pub(crate) fn geco1(model: &dyn Pds, y: &[f64], dt: f64) -> Result<StepOutcome, IntegratorError> {
    check_inputs(model, y, dt)?;
    let arg = dt * model.destruction_rate_sum(y)?;
    let big_phi = dt * phi_nonneg(arg);
    let f = model.rhs(y);
    let next: Vec<f64> = y.iter().zip(&f).map(|(y, f)| y + big_phi * f).collect();
    check_output(&next)?;
    Ok(StepOutcome {
        phi_args: vec![arg],
        ..StepOutcome::plain(next)
    })
}

pub(crate) fn geco2(model: &dyn Pds, y: &[f64], dt: f64) -> Result<StepOutcome, IntegratorError> {
    check_inputs(model, y, dt)?;
    let arg1 = dt * model.destruction_rate_sum(y)?;
    let phi1 = phi_nonneg(arg1);
    let f1 = model.rhs(y);
    let y2: Vec<f64> = y.iter().zip(&f1).map(|(y, f)| y + dt * phi1 * f).collect();
    check_output(&y2)?;
    let f2 = model.rhs(&y2);
    let w: Vec<f64> = f1
        .iter()
        .zip(&f2)
        .map(|(a, b)| 2.0 * phi1 * a - a - b)
        .collect();
    let mut warnings = Vec::new();
    let mut ratio_sum = 0.0;
    for (i, (&wi, &yi)) in w.iter().zip(y).enumerate() {
        if wi > 0.0 {
            if yi > 0.0 {
                ratio_sum += wi / yi;
            } else {
                ratio_sum = f64::INFINITY;
                warnings.push(format!(
                    "component {i} is zero with positive w; phi argument is infinite and the step is the identity"
                ));
            }
        }
    }
    let arg2 = dt * ratio_sum;
    let scale = 0.5 * dt * phi_nonneg(arg2);
    let next: Vec<f64> = y
        .iter()
        .zip(f1.iter().zip(&f2))
        .map(|(y, (a, b))| y + scale * (a + b))
        .collect();
    check_output(&next)?;
    Ok(StepOutcome {
        phi_args: vec![arg1, arg2],
        warnings,
        ..StepOutcome::plain(next)
    })
}

#[cfg(test)]
mod tests {
    use super::super::Bbks;
    use super::*;
    use crate::pds::{Builtin, GeneralPds, LinearPds};

    fn unit_2x2() -> LinearPds {
        Builtin::Paper2x2 {
            a: 1.0,
            b: 1.0,
            c: 1.0,
        }
        .model()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn micro_step_oracles() {
        let m = unit_2x2();
        let y = [2.0, 1.0];
        assert!(close(
            &euler(&m, &y, 1.0).unwrap().next_state,
            &[1.0, 2.0],
            0.0
        ));
        // z = -2 is on the Heun stability boundary with R(-2) = 1: the step is the identity
        assert!(close(
            &heun(&m, &y, 1.0).unwrap().next_state,
            &[2.0, 1.0],
            0.0
        ));
        let g1 = geco1(&m, &y, 1.0).unwrap();
        assert!(close(
            &g1.next_state,
            &[1.567_667_641_618_306_3, 1.432_332_358_381_693_7],
            1e-15
        ));
        let g2 = geco2(&m, &y, 1.0).unwrap();
        assert!(close(
            &g2.next_state,
            &[1.469_069_300_652_724, 1.530_930_699_347_276],
            1e-15
        ));
        assert!((g2.phi_args[1] - 0.135_335_283_236_612_7).abs() < 1e-15);
        let b1 = gbbks1(&m, &y, 1.0, &Bbks).unwrap();
        assert!((b1.tau - 2.0 / 3.0).abs() < 2e-15);
        assert!(close(&b1.next_state, &[4.0 / 3.0, 5.0 / 3.0], 1e-14));
        let b2 = gbbks2(&m, &y, 1.0, 1.0, &Bbks).unwrap();
        assert!((b2.tau - 1.2).abs() < 1e-14);
        assert!((b2.stage_tau.unwrap() - 2.0 / 3.0).abs() < 2e-15);
        assert!(close(&b2.next_state, &[1.6, 1.4], 1e-14));
    }

    #[test]
    fn geco2_zero_component_with_positive_w_degenerates_to_identity() {
        // y1' = y2^2, y2' = -y2^2 from (0, 1): w_1 > 0 while y_1 = 0
        let m =
            GeneralPds::new(2, |y| vec![y[1] * y[1], 0.0], |y| vec![0.0, y[1]]).ratio_safe(true);
        let y = [0.0, 1.0];
        let out = geco2(&m, &y, 0.1).unwrap();
        assert_eq!(out.phi_args[1], f64::INFINITY);
        assert_eq!(out.warnings.len(), 1);
        assert_eq!(out.next_state, y.to_vec());
    }

    #[test]
    fn linear_geco_accepts_boundary_start() {
        let m = Builtin::Paper5x5.model();
        let y = Builtin::Paper5x5.y0();
        for dt in [0.1, 1.0, 10.0] {
            let g1 = geco1(&m, &y, dt).unwrap();
            let g2 = geco2(&m, &y, dt).unwrap();
            assert!(g1
                .next_state
                .iter()
                .chain(&g2.next_state)
                .all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn general_model_zero_component_needs_ratio_safe_rates() {
        let m = GeneralPds::new(2, |y| vec![y[1] * y[1], 0.0], |y| vec![0.0, y[1]]);
        assert!(matches!(
            geco1(&m, &[0.0, 1.0], 0.1),
            Err(IntegratorError::Model(_))
        ));
    }

    #[test]
    fn rejects_bad_step_size() {
        let m = unit_2x2();
        assert!(geco1(&m, &[1.0, 1.0], 0.0).is_err());
        assert!(euler(&m, &[1.0, 1.0], f64::NAN).is_err());
        assert!(gbbks2(&m, &[1.0, 1.0], 1.0, 0.4, &Bbks).is_err());
    }
}
