use super::IntegratorError;

pub const TAU_RESIDUAL_TOL: f64 = 1e-14;
pub const TAU_MAX_ITER: usize = 200;

/// Root of the gBBKS product equation with solver diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct TauSolution {
    pub tau: f64,
    /// `c_m + d_m τ` per index, evaluated without cancellation near `τ_max`.
    pub factors: Vec<f64>,
    /// `G(τ)` at the returned root.
    pub residual: f64,
    pub iterations: usize,
}

/// `G(τ) = (∏_m (c_m + d_m τ)/σ_m)^r − τ`.
pub fn tau_residual(c: &[f64], d: &[f64], sigma: &[f64], r: f64, tau: f64) -> f64 {
    let prod: f64 = c
        .iter()
        .zip(d)
        .zip(sigma)
        .map(|((c, d), s)| (c + d * tau) / s)
        .product();
    prod.powf(r) - tau
}

/// Midpoint of two nonnegative floats in the ordering of their bit patterns.
fn bit_midpoint(a: f64, b: f64) -> f64 {
    f64::from_bits(a.to_bits() / 2 + b.to_bits() / 2 + (a.to_bits() & b.to_bits() & 1))
}

/// Largest `x ∈ [lo, hi]` (to adjacent floats) with `positive(x)`, given
/// `positive(lo)` and `!positive(hi)`.
fn bisect_bits(
    mut lo: f64,
    mut hi: f64,
    positive: impl Fn(f64) -> bool,
) -> Result<(f64, f64, usize), IntegratorError> {
    for iterations in 1..=TAU_MAX_ITER {
        let mid = bit_midpoint(lo, hi);
        if mid <= lo || mid >= hi {
            return Ok((lo, hi, iterations));
        }
        if positive(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(IntegratorError::TauNoConvergence { lo, hi })
}

/// The unique `τ ∈ (0, τ_max)`, `τ_max = min_m c_m/(−d_m)`, with `G(τ) = 0`.
///
/// `G` is strictly decreasing with `G(0) > 0` and `G(τ_max) < 0`. When the
/// root lies in the lower half of the bracket, `τ` is bisected directly;
/// otherwise the gap `s = τ_max − τ` is bisected and the factors are formed
/// as `(c_m + d_m τ_max) + |d_m|·s`, which keeps them accurate even when
/// they are many orders of magnitude below `c_m`. Bisection runs on the bit
/// patterns, so it ends on adjacent floats within 64 halvings; of the two
/// final candidates the one with the smaller `|G|` is returned. An empty
/// index set returns `τ = 1`.
pub fn solve_tau(
    c: &[f64],
    d: &[f64],
    sigma: &[f64],
    r: f64,
) -> Result<TauSolution, IntegratorError> {
    if c.len() != d.len() || c.len() != sigma.len() {
        return Err(IntegratorError::Domain(
            "solve_tau inputs differ in length".into(),
        ));
    }
    if c.is_empty() {
        return Ok(TauSolution {
            tau: 1.0,
            factors: Vec::new(),
            residual: 0.0,
            iterations: 0,
        });
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(IntegratorError::Domain(format!(
            "exponent r must be positive, got {r}"
        )));
    }
    for m in 0..c.len() {
        if !(c[m] > 0.0) || !c[m].is_finite() {
            return Err(IntegratorError::Domain(format!(
                "c[{m}] = {} must be positive",
                c[m]
            )));
        }
        if !(d[m] < 0.0) || !d[m].is_finite() {
            return Err(IntegratorError::Domain(format!(
                "d[{m}] = {} must be negative",
                d[m]
            )));
        }
        if !(sigma[m] > 0.0) || !sigma[m].is_finite() {
            return Err(IntegratorError::NonPositiveSigma {
                index: m,
                value: sigma[m],
            });
        }
    }
    let (binding, tau_max) = c.iter().zip(d).map(|(c, d)| c / -d).enumerate().fold(
        (0, f64::INFINITY),
        |best, (m, t)| if t < best.1 { (m, t) } else { best },
    );
    let half = 0.5 * tau_max;
    let g_tau = |t: f64| tau_residual(c, d, sigma, r, t);

    let (tau, factors, residual, iterations) = if g_tau(half) <= 0.0 {
        let (lo, hi, iterations) = bisect_bits(0.0, half, |t| g_tau(t) > 0.0)?;
        let (tau, residual) = [lo, hi]
            .into_iter()
            .map(|t| (t, g_tau(t)))
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .expect("two candidates");
        let factors = c.iter().zip(d).map(|(c, d)| c + d * tau).collect();
        (tau, factors, residual, iterations)
    } else {
        let floor: Vec<f64> = c
            .iter()
            .zip(d)
            .enumerate()
            .map(|(m, (c, d))| {
                if m == binding {
                    0.0
                } else {
                    (c + d * tau_max).max(0.0)
                }
            })
            .collect();
        let factors_at =
            |s: f64| -> Vec<f64> { floor.iter().zip(d).map(|(e, d)| e - d * s).collect() };
        let g_gap = |s: f64| {
            let prod: f64 = factors_at(s)
                .iter()
                .zip(sigma)
                .map(|(f, s)| f / s)
                .product();
            prod.powf(r) - (tau_max - s)
        };
        let (lo, hi, iterations) = bisect_bits(0.0, half, |s| g_gap(s) < 0.0)?;
        let (s, residual) = [lo, hi]
            .into_iter()
            .map(|s| (s, g_gap(s)))
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .expect("two candidates");
        let s = if s > 0.0 { s } else { hi };
        (tau_max - s, factors_at(s), residual, iterations)
    };
    Ok(TauSolution {
        tau,
        factors,
        residual,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_index_closed_form() {
        // tau = (2 - tau)/2
        let s = solve_tau(&[2.0], &[-1.0], &[2.0], 1.0).unwrap();
        assert!((s.tau - 2.0 / 3.0).abs() < 2e-15);
        assert!(s.residual.abs() <= TAU_RESIDUAL_TOL);
    }

    #[test]
    fn second_stage_closed_form() {
        // tau = (2 - tau/3)/(4/3)
        let s = solve_tau(&[2.0], &[-1.0 / 3.0], &[4.0 / 3.0], 1.0).unwrap();
        assert!((s.tau - 1.2).abs() < 2e-15);
    }

    #[test]
    fn factors_keep_relative_accuracy_near_tau_max() {
        // tau = 1 - 1e20·tau, so the factor 1 - 1e20·tau equals 1/(1 + 1e20)
        let s = solve_tau(&[1.0], &[-1e20], &[1.0], 1.0).unwrap();
        let exact = 1.0 / (1.0 + 1e20);
        assert!(
            (s.factors[0] - exact).abs() <= 1e-14 * exact,
            "{:e}",
            s.factors[0]
        );
        assert!((s.tau - exact).abs() <= 1e-14 * exact);
    }

    #[test]
    fn root_in_either_half_matches_direct_residual() {
        for (c, d, sigma, r) in [
            ([1.0, 3.0], [-2.0, -0.5], [0.5, 2.0], 0.7),
            ([1.0, 2.0], [-50.0, -60.0], [1.0, 2.0], 1.0),
        ] {
            let sol = solve_tau(&c, &d, &sigma, r).unwrap();
            let direct: Vec<f64> = c.iter().zip(&d).map(|(c, d)| c + d * sol.tau).collect();
            for (f, g) in sol.factors.iter().zip(&direct) {
                assert!(*f > 0.0 && (f - g).abs() <= 1e-14 * c[0].max(c[1]));
            }
            assert!(tau_residual(&c, &d, &sigma, r, sol.tau).abs() <= TAU_RESIDUAL_TOL);
        }
    }

    #[test]
    fn empty_index_set_gives_one() {
        assert_eq!(solve_tau(&[], &[], &[], 1.0).unwrap().tau, 1.0);
    }

    #[test]
    fn two_indices_with_exponent() {
        let (c, d, s, r) = ([1.0, 3.0], [-2.0, -0.5], [0.5, 2.0], 0.7);
        let sol = solve_tau(&c, &d, &s, r).unwrap();
        assert!(sol.residual.abs() <= TAU_RESIDUAL_TOL);
        for m in 0..2 {
            assert!(c[m] + d[m] * sol.tau > 0.0);
        }
    }

    #[test]
    fn precondition_violations() {
        assert!(solve_tau(&[0.0], &[-1.0], &[1.0], 1.0).is_err());
        assert!(solve_tau(&[1.0], &[1.0], &[1.0], 1.0).is_err());
        assert!(matches!(
            solve_tau(&[1.0], &[-1.0], &[0.0], 1.0),
            Err(IntegratorError::NonPositiveSigma { index: 0, .. })
        ));
        assert!(solve_tau(&[1.0], &[-1.0], &[1.0], 0.0).is_err());
    }
}
