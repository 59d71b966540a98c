use std::fmt;

use num_complex::Complex64;

use super::StabilityError;
use crate::integrators::{phi, SchemeId, SchemeSpec};
use crate::linalg::{eigenvalues, Matrix, Spectrum};
use crate::pds::LinearPds;

/// Eigenvalues within this distance of 1 are attributed to the kernel.
pub const KERNEL_WINDOW: f64 = 1e-8;
/// Band around the unit circle in which no verdict is given.
pub const VERDICT_TOL: f64 = 1e-9;
pub const FD_STEP: f64 = 1e-6;
/// Entrywise agreement required between closed-form and finite-difference
/// Jacobians; the step maps are only `C^{1,1}`, so the difference error is
/// `O(h)`.
pub const FD_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub jacobian: Matrix,
    pub spectrum: Spectrum,
    /// Eigenvalues with `|μ − 1| ≤ KERNEL_WINDOW`.
    pub kernel_count: usize,
    /// `dim ker(A)`, which `kernel_count` must match.
    pub kernel_dim: usize,
    pub non_kernel_radius: f64,
    /// Largest entrywise gap to the finite-difference Jacobian.
    pub fd_max_error: f64,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

/// Jacobian of the step map at a positive steady state of `y' = Ay`.
///
/// * euler, gbbks1: `I + ΔtA`
/// * heun, gbbks2(α): `I + ΔtA + Δt²A²/2`
/// * geco1: `I + Φ(Δt)A` with `Φ(Δt) = Δt·φ(Δt·trace S⁻)`
/// * geco2: `I + ΔtA + Δt²φ(Δt·trace S⁻)A²/2`
pub fn closed_form_jacobian(
    model: &LinearPds,
    scheme: SchemeId,
    dt: f64,
) -> Result<Matrix, StabilityError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(StabilityError::Domain(format!(
            "step size must be finite and positive, got {dt}"
        )));
    }
    let a = model.matrix();
    let n = a.rows();
    let id = Matrix::identity(n);
    let phi_t = phi(dt * model.trace_s_minus())?;
    let a2 = || a * a;
    Ok(match scheme {
        SchemeId::Euler | SchemeId::Gbbks1 => &id + &a.scaled(dt),
        SchemeId::Heun | SchemeId::Gbbks2 => &(&id + &a.scaled(dt)) + &a2().scaled(0.5 * dt * dt),
        SchemeId::Geco1 => &id + &a.scaled(dt * phi_t),
        SchemeId::Geco2 => &(&id + &a.scaled(dt)) + &a2().scaled(0.5 * dt * dt * phi_t),
    })
}

/// Central differences with per-coordinate step `h·max(1, |y_i|)`.
pub fn numerical_jacobian<F, E>(step_map: F, y_star: &[f64], h: f64) -> Result<Matrix, E>
where
    F: Fn(&[f64]) -> Result<Vec<f64>, E>,
{
    let n = y_star.len();
    let mut jac = Matrix::zeros(n, n);
    let mut probe = y_star.to_vec();
    for j in 0..n {
        let hj = h * y_star[j].abs().max(1.0);
        probe[j] = y_star[j] + hj;
        let plus = step_map(&probe)?;
        probe[j] = y_star[j] - hj;
        let minus = step_map(&probe)?;
        probe[j] = y_star[j];
        for i in 0..n {
            jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * hj);
        }
    }
    Ok(jac)
}

/// Fixed-point verdict for `scheme` at `y_star ∈ ker(A)`, `y_star > 0`.
///
/// The closed-form Jacobian is cross-checked against central differences;
/// eigenvalues within [`KERNEL_WINDOW`] of 1 are counted as kernel
/// directions and must number `dim ker(A)`. The remaining spectral radius
/// decides the verdict with a [`VERDICT_TOL`] band of indecision.
pub fn classify_fixed_point(
    model: &LinearPds,
    scheme: &SchemeSpec,
    y_star: &[f64],
    dt: f64,
) -> Result<StabilityReport, StabilityError> {
    if y_star.len() != model.matrix().rows() {
        return Err(StabilityError::Domain(
            "steady state length differs from model dimension".into(),
        ));
    }
    if let Some(i) = y_star.iter().position(|v| !(*v > 0.0)) {
        return Err(StabilityError::Domain(format!(
            "steady state component {i} is not positive"
        )));
    }
    let mut notes = Vec::new();
    let jacobian = closed_form_jacobian(model, scheme.id(), dt)?;
    let fd = numerical_jacobian(
        |y| scheme.step(model, y, dt).map(|o| o.next_state),
        y_star,
        FD_STEP,
    )?;
    let fd_max_error = jacobian.max_abs_diff(&fd);
    let spectrum = eigenvalues(&jacobian)?;
    let one = Complex64::new(1.0, 0.0);
    let kernel_count = spectrum
        .values
        .iter()
        .filter(|m| (*m - one).norm() <= KERNEL_WINDOW)
        .count();
    let non_kernel_radius = spectrum
        .values
        .iter()
        .filter(|m| (*m - one).norm() > KERNEL_WINDOW)
        .map(|m| m.norm())
        .fold(0.0, f64::max);
    let kernel_dim = model.kernel_basis().len();

    let mut verdict = if non_kernel_radius < 1.0 - VERDICT_TOL {
        Verdict::Stable
    } else if non_kernel_radius > 1.0 + VERDICT_TOL {
        Verdict::Unstable
    } else {
        notes.push(format!(
            "non-kernel spectral radius {non_kernel_radius} lies on the unit circle"
        ));
        Verdict::Inconclusive
    };
    if kernel_count != kernel_dim {
        notes.push(format!(
            "{kernel_count} eigenvalues within the kernel window, but dim ker(A) = {kernel_dim}"
        ));
        verdict = Verdict::Inconclusive;
    }
    if !(fd_max_error <= FD_TOL) {
        notes.push(format!(
            "closed-form and finite-difference Jacobians differ by {fd_max_error:e}"
        ));
        verdict = Verdict::Inconclusive;
    }
    Ok(StabilityReport {
        jacobian,
        spectrum,
        kernel_count,
        kernel_dim,
        non_kernel_radius,
        fd_max_error,
        verdict,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pds::{steady_state_for, Builtin};

    #[test]
    fn two_by_two_jacobians_match_finite_differences() {
        let m = Builtin::Paper2x2 {
            a: 1.0,
            b: 1.0,
            c: 1.0,
        }
        .model();
        let y_star = [1.5, 1.5];
        let geco1 = closed_form_jacobian(&m, SchemeId::Geco1, 1.0).unwrap();
        assert!((geco1[(0, 0)] - (1.0 - 0.432_332_358_381_693_65)).abs() < 1e-15);
        for id in SchemeId::ALL {
            let s = SchemeSpec::new(id);
            let fd = numerical_jacobian(
                |y| s.step(&m, y, 1.0).map(|o| o.next_state),
                &y_star,
                FD_STEP,
            )
            .unwrap();
            let cf = closed_form_jacobian(&m, id, 1.0).unwrap();
            assert!(
                cf.max_abs_diff(&fd) <= FD_TOL,
                "{id}: {}",
                cf.max_abs_diff(&fd)
            );
        }
    }

    #[test]
    fn five_by_five_verdicts() {
        let b = Builtin::Paper5x5;
        let m = b.model();
        let y_star = steady_state_for(&m, &b.y0()).unwrap();
        let r = classify_fixed_point(&m, &SchemeSpec::geco1(), &y_star, 1.0).unwrap();
        assert_eq!(r.verdict, Verdict::Stable);
        assert_eq!(r.kernel_count, 1);
        assert_eq!(
            classify_fixed_point(&m, &SchemeSpec::geco2(), &y_star, 0.3576)
                .unwrap()
                .verdict,
            Verdict::Unstable
        );
        assert_eq!(
            classify_fixed_point(&m, &SchemeSpec::bbks1(), &y_star, 0.2968)
                .unwrap()
                .verdict,
            Verdict::Stable
        );
    }

    #[test]
    fn kernel_vectors_are_fixed_by_jacobians() {
        let m = Builtin::Paper5x5.model();
        let v = &m.kernel_basis()[0];
        for id in SchemeId::ALL {
            let j = closed_form_jacobian(&m, id, 0.7).unwrap();
            let jv = j.mul_vec(v);
            assert!(jv.iter().zip(v).all(|(a, b)| (a - b).abs() <= 1e-10));
        }
    }

    #[test]
    fn rejects_boundary_steady_state() {
        let m = Builtin::Paper2x2 {
            a: 1.0,
            b: 1.0,
            c: 1.0,
        }
        .model();
        assert!(classify_fixed_point(&m, &SchemeSpec::geco1(), &[0.0, 0.0], 1.0).is_err());
    }
}
