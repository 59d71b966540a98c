use std::fmt;

/// Parameter functions of the gBBKS family.
///
/// Values are evaluated once per step from `yⁿ` (and the inner stage
/// `y⁽²⁾` for `σ` in gBBKS2). Outputs must be strictly positive wherever they
/// enter a product; the step maps reject `σ_m ≤ 0` at runtime. For the fixed
/// point property, `σ(v, v) = π(v) = v` should hold whenever `Av = 0`.
pub trait GbbksStrategy: Send + Sync + fmt::Debug {
    /// `σ(yⁿ)` of the first order scheme.
    fn sigma_first(&self, y: &[f64]) -> Vec<f64>;
    /// `σ(yⁿ, y⁽²⁾)` of the outer stage of gBBKS2(α).
    fn sigma_second(&self, y: &[f64], y2: &[f64], alpha: f64) -> Vec<f64>;
    /// `π(yⁿ)` of the inner stage of gBBKS2(α).
    fn pi(&self, y: &[f64]) -> Vec<f64>;
    fn r(&self, y: &[f64]) -> f64;
    fn q(&self, y: &[f64]) -> f64;
}

/// The BBKS presets: `σ = yⁿ`, `r = 1` for first order; `π = yⁿ`,
/// `σ_m = (y_mⁿ)^{1−1/α}(y_m⁽²⁾)^{1/α}`, `q = r = 1` for second order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Bbks;

impl GbbksStrategy for Bbks {
    fn sigma_first(&self, y: &[f64]) -> Vec<f64> {
        y.to_vec()
    }

    fn sigma_second(&self, y: &[f64], y2: &[f64], alpha: f64) -> Vec<f64> {
        if alpha == 1.0 {
            return y2.to_vec();
        }
        let e = 1.0 / alpha;
        y.iter()
            .zip(y2)
            .map(|(a, b)| a.powf(1.0 - e) * b.powf(e))
            .collect()
    }

    fn pi(&self, y: &[f64]) -> Vec<f64> {
        y.to_vec()
    }

    fn r(&self, _y: &[f64]) -> f64 {
        1.0
    }

    fn q(&self, _y: &[f64]) -> f64 {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_order_sigma_on_kernel_is_identity() {
        let v = [1.5, 0.25, 3.0];
        for alpha in [0.5, 1.0, 2.0, 7.5] {
            let s = Bbks.sigma_second(&v, &v, alpha);
            for (a, b) in s.iter().zip(v) {
                assert!((a - b).abs() <= 4.0 * f64::EPSILON * b);
            }
        }
    }

    #[test]
    fn geometric_mean_weighting() {
        let s = Bbks.sigma_second(&[4.0], &[1.0], 2.0);
        assert!((s[0] - 2.0).abs() < 1e-15);
    }
}
