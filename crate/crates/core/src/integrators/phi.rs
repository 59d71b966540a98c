use super::IntegratorError;

const SERIES_SWITCH: f64 = 1e-5;

/// `φ(x) = (1 − e^{−x})/x` with `φ(0) = 1` and `φ(+∞) = 0`.
///
/// Below `1e−5` a four-term Taylor expansion is used; above it the numerator
/// is formed with `expm1`, so no digits are lost to cancellation.
pub fn phi(x: f64) -> Result<f64, IntegratorError> {
    if x.is_nan() || x < 0.0 {
        return Err(IntegratorError::Domain(format!(
            "phi needs a nonnegative argument, got {x}"
        )));
    }
    Ok(phi_nonneg(x))
}

pub(crate) fn phi_nonneg(x: f64) -> f64 {
    if x == f64::INFINITY {
        0.0
    } else if x < SERIES_SWITCH {
        1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0
    } else {
        -(-x).exp_m1() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert_eq!(phi(0.0).unwrap(), 1.0);
        assert_eq!(phi(f64::INFINITY).unwrap(), 0.0);
        assert!((phi(2.0).unwrap() - 0.432_332_358_381_693_65).abs() < 1e-16);
        let ln2 = std::f64::consts::LN_2;
        assert!((phi(ln2).unwrap() - 0.721_347_520_444_481_7).abs() < 1e-16);
    }

    #[test]
    fn continuous_across_series_switch() {
        let below = phi(SERIES_SWITCH * (1.0 - 1e-12)).unwrap();
        let above = phi(SERIES_SWITCH).unwrap();
        assert!((below - above).abs() < 1e-15);
    }

    #[test]
    fn tiny_arguments_keep_full_precision() {
        let x = 1e-16;
        assert_eq!(phi(x).unwrap(), 1.0 - x / 2.0);
    }

    #[test]
    fn rejects_negative_and_nan() {
        assert!(phi(-1e-300).is_err());
        assert!(phi(f64::NAN).is_err());
    }

    #[test]
    fn range_is_unit_interval() {
        for x in [1e-300, 1e-8, 0.5, 3.0, 40.0, 1e6, 1e300] {
            let v = phi(x).unwrap();
            assert!(v > 0.0 && v <= 1.0, "phi({x}) = {v}");
        }
    }
}
