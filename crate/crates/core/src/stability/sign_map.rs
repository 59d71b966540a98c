use super::StabilityError;
use crate::integrators::phi;

/// `w = (2φA − 2A − Δt·φA²)y` with `φ = φ(Δt(ac + b))` for the 2×2 system
/// `A = [[−ac, bc], [a, −b]]`.
///
/// This is the GeCo2 weight vector `2φ f(y) − f(y) − f(y⁽²⁾)` written out for
/// linear right-hand sides. It satisfies `w₂ = −w₁/c` (equivalently `w₁ = −c·w₂`), and `w₁` has the sign
/// of `y₁ − (b/a)y₂`.
///
/// Since `A² = −(ac + b)A`, the vector is evaluated as `g(z)·Ay` with
/// `z = Δt(ac + b)` and `g(z) = (2 + z)φ(z) − 2`.
pub fn w_vector(a: f64, b: f64, c: f64, y: &[f64; 2], dt: f64) -> Result<[f64; 2], StabilityError> {
    for (name, v) in [("a", a), ("b", b), ("c", c), ("dt", dt)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(StabilityError::Domain(format!(
                "{name} must be finite and positive, got {v}"
            )));
        }
    }
    let g = weight_factor(dt * (a * c + b))?;
    let ay2 = a * y[0] - b * y[1];
    Ok([-c * g * ay2, g * ay2])
}

/// `g(z) = (2 + z)φ(z) − 2 = Σ_{n≥2} (−1)ⁿ(1 − n)zⁿ/(n + 1)!`, summed as a
/// series for small `z` where the closed form cancels.
fn weight_factor(z: f64) -> Result<f64, StabilityError> {
    if z > 0.5 {
        return Ok((2.0 + z) * phi(z)? - 2.0);
    }
    let mut power_over_factorial = -z / 2.0;
    let mut sum = 0.0;
    for n in 2..30 {
        power_over_factorial *= -z / (n as f64 + 1.0);
        sum += (1.0 - n as f64) * power_over_factorial;
    }
    Ok(sum)
}
