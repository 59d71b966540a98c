use num_complex::Complex64;

use super::StabilityError;
use crate::integrators::{phi, SchemeId};
use crate::linalg::{eigenvalues, SPECTRUM_ZERO_TOL};
use crate::pds::LinearPds;

pub const CRITICAL_STEP_START: f64 = 1e-6;
pub const CRITICAL_STEP_CAP: f64 = 1e6;
/// Relative bracket width at which the critical-step bisection stops.
pub const CRITICAL_STEP_WIDTH: f64 = 1e-10;
/// Interval reported for the left end of the GeCo2 stability region on the
/// negative real axis in the literature; not reproducible from `R`.
pub const PAPER_BRACKET: (f64, f64) = (-3.9924, -3.9923);

/// `R(z)` of `scheme` for the linear test class; `dt_trace = Δt·trace(S⁻)`
/// enters the GeCo schemes only.
///
/// * euler, gbbks1: `1 + z`
/// * heun, gbbks2: `1 + z + z²/2`
/// * geco1: `1 + z·φ(dt_trace)`
/// * geco2: `1 + z + z²·φ(dt_trace)/2`
pub fn stability_value(
    scheme: SchemeId,
    z: Complex64,
    dt_trace: f64,
) -> Result<Complex64, StabilityError> {
    let one = Complex64::new(1.0, 0.0);
    Ok(match scheme {
        SchemeId::Euler | SchemeId::Gbbks1 => one + z,
        SchemeId::Heun | SchemeId::Gbbks2 => one + z + z * z * 0.5,
        SchemeId::Geco1 => one + z * phi(dt_trace).map_err(StabilityError::from)?,
        SchemeId::Geco2 => one + z + z * z * (0.5 * phi(dt_trace).map_err(StabilityError::from)?),
    })
}

/// Smallest step size at which some non-kernel eigenvalue reaches the unit
/// circle, or `None` for unconditional stability up to the search cap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalStep {
    pub dt_star: Option<f64>,
    /// Eigenvalue of `A` attaining `max |R(Δt λ)|` at `dt_star`.
    pub binding_eigenvalue: Option<Complex64>,
    pub bracket_width: f64,
    /// `max |R|` at the returned step (or at the cap when unconditional).
    pub max_modulus: f64,
}

impl CriticalStep {
    pub fn is_unconditional(&self) -> bool {
        self.dt_star.is_none()
    }
}

fn max_modulus(
    scheme: SchemeId,
    lambdas: &[Complex64],
    trace: f64,
    dt: f64,
) -> Result<(f64, Complex64), StabilityError> {
    let mut best = (0.0, Complex64::new(0.0, 0.0));
    for &l in lambdas {
        let r = stability_value(scheme, l * dt, dt * trace)?.norm();
        if r > best.0 {
            best = (r, l);
        }
    }
    Ok(best)
}

/// Bracket-doubling from `1e−6` to `1e6`, then bisection on
/// `max_λ |R(Δt λ, Δt·trace S⁻)| − 1` over the nonzero eigenvalues of `A`.
///
/// If the modulus already reaches 1 at the start step (an eigenvalue on the
/// imaginary axis), `dt_star` is `Some(0.0)`.
pub fn critical_step(model: &LinearPds, scheme: SchemeId) -> Result<CriticalStep, StabilityError> {
    let a = model.matrix();
    let spectrum = eigenvalues(a)?;
    let lambdas = spectrum.nonzero(SPECTRUM_ZERO_TOL * a.norm_fro());
    let trace = model.trace_s_minus();
    let g = |dt: f64| max_modulus(scheme, &lambdas, trace, dt);

    if lambdas.is_empty() {
        return Ok(CriticalStep {
            dt_star: None,
            binding_eigenvalue: None,
            bracket_width: 0.0,
            max_modulus: 0.0,
        });
    }
    let (m0, l0) = g(CRITICAL_STEP_START)?;
    if m0 >= 1.0 {
        return Ok(CriticalStep {
            dt_star: Some(0.0),
            binding_eigenvalue: Some(l0),
            bracket_width: CRITICAL_STEP_START,
            max_modulus: m0,
        });
    }
    let mut lo = CRITICAL_STEP_START;
    let mut hi = lo;
    loop {
        let next = (2.0 * hi).min(CRITICAL_STEP_CAP);
        let (m, _) = g(next)?;
        if m >= 1.0 {
            hi = next;
            break;
        }
        lo = next;
        hi = next;
        if next >= CRITICAL_STEP_CAP {
            return Ok(CriticalStep {
                dt_star: None,
                binding_eigenvalue: None,
                bracket_width: 0.0,
                max_modulus: m,
            });
        }
    }
    while hi - lo > CRITICAL_STEP_WIDTH * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid)?.0 >= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let dt_star = 0.5 * (lo + hi);
    let (m, l) = g(dt_star)?;
    Ok(CriticalStep {
        dt_star: Some(dt_star),
        binding_eigenvalue: Some(l),
        bracket_width: hi - lo,
        max_modulus: m,
    })
}

/// `M = min 2|Re λ|/|λ|²` over the nonzero eigenvalues and the product
/// `M·trace(S⁻)`; `M·trace(S⁻) ≥ 1` places every `1 + Φ(Δt)λ` inside the
/// unit disk for all `Δt > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate {
    pub m_value: f64,
    pub trace_s_minus: f64,
    pub product: f64,
    pub holds: bool,
}

pub fn unconditional_certificate(model: &LinearPds) -> Result<Certificate, StabilityError> {
    let a = model.matrix();
    let spectrum = eigenvalues(a)?;
    let m_value = spectrum
        .nonzero(SPECTRUM_ZERO_TOL * a.norm_fro())
        .iter()
        .map(|l| 2.0 * l.re.abs() / l.norm_sqr())
        .fold(f64::INFINITY, f64::min);
    let trace_s_minus = model.trace_s_minus();
    let product = m_value * trace_s_minus;
    Ok(Certificate {
        m_value,
        trace_s_minus,
        product,
        holds: product >= 1.0 - 1e-12,
    })
}

/// `R(z) = 1 + z + z²·φ(−z)/2 = 1 + (z/2)(1 + e^z)` for real `z ≤ 0`: the
/// GeCo2 stability function under `Δt·trace(S⁻) = −z`.
pub fn geco2_remark_r(z: f64) -> f64 {
    1.0 + 0.5 * z * (1.0 + z.exp())
}

/// Left end `z*` of `{z ≤ 0 : |R(z)| < 1}` for [`geco2_remark_r`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionEndpoint {
    pub z_star: f64,
    /// `|R(z*)| − 1`.
    pub modulus_residual: f64,
    /// `z*(1 + e^{z*}) + 4`.
    pub reduced_residual: f64,
    pub paper_bracket: (f64, f64),
    /// Whether `z*` lies inside [`PAPER_BRACKET`].
    pub inside_reference_bracket: bool,
}

/// Bisection for `R(z) = −1` on `[−5, −2]`, where `R(−2) > −1 > R(−5)`.
pub fn geco2_region_endpoint() -> RegionEndpoint {
    let h = |z: f64| geco2_remark_r(z) + 1.0;
    let (mut lo, mut hi) = (-5.0_f64, -2.0_f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let z_star = 0.5 * (lo + hi);
    let (a, b) = PAPER_BRACKET;
    RegionEndpoint {
        z_star,
        modulus_residual: geco2_remark_r(z_star).abs() - 1.0,
        reduced_residual: z_star * (1.0 + z_star.exp()) + 4.0,
        paper_bracket: PAPER_BRACKET,
        inside_reference_bracket: a <= z_star && z_star <= b,
    }
}
