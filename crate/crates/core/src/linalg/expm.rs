//! Action of the matrix exponential, `exp(tA)·y0`.
//!
//! Scaling and squaring around a diagonal (6,6) Padé approximant. The scaling
//! exponent keeps `‖tA‖∞ / 2^s ≤ 0.5`.

use super::{lu_solve, LinalgError, Matrix};

const PADE_ORDER: usize = 6;
const SCALED_NORM_TARGET: f64 = 0.5;

fn pade_coefficients() -> [f64; PADE_ORDER + 1] {
    // c_k = (2m-k)! m! / ((2m)! k! (m-k)!)
    let m = PADE_ORDER;
    let mut c = [0.0; PADE_ORDER + 1];
    c[0] = 1.0;
    for k in 1..=m {
        c[k] = c[k - 1] * (m + 1 - k) as f64 / (k * (2 * m + 1 - k)) as f64;
    }
    c
}

/// `exp(A)` for a matrix of moderate norm.
pub fn expm(a: &Matrix) -> Result<Matrix, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::Shape("expm needs a square matrix".into()));
    }
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let n = a.rows();
    let norm = a.norm_inf();
    let squarings = if norm > SCALED_NORM_TARGET {
        (norm / SCALED_NORM_TARGET).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let x = a.scaled(0.5f64.powi(squarings));

    let c = pade_coefficients();
    let mut numer = Matrix::identity(n);
    let mut denom = Matrix::identity(n);
    let mut power = Matrix::identity(n);
    for (k, ck) in c.iter().enumerate().skip(1) {
        power = &power * &x;
        let term = power.scaled(*ck);
        numer = &numer + &term;
        denom = if k % 2 == 0 {
            &denom + &term
        } else {
            &denom - &term
        };
    }
    let mut e = lu_solve(&denom, &numer)?;
    for _ in 0..squarings {
        e = &e * &e;
    }
    if !e.is_finite() {
        return Err(LinalgError::Overflow);
    }
    Ok(e)
}

/// `exp(tA)·y0` for `t ≥ 0`.
pub fn expm_apply(a: &Matrix, y0: &[f64], t: f64) -> Result<Vec<f64>, LinalgError> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(LinalgError::Domain(format!(
            "expm_apply needs finite t >= 0, got {t}"
        )));
    }
    if y0.len() != a.cols() {
        return Err(LinalgError::Shape(
            "initial vector length differs from matrix size".into(),
        ));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    if t == 0.0 {
        return Ok(y0.to_vec());
    }
    let e = expm(&a.scaled(t))?;
    let out = e.mul_vec(y0);
    if out.iter().any(|v| !v.is_finite()) {
        return Err(LinalgError::Overflow);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_match_closed_form() {
        let c = pade_coefficients();
        let expected = [
            1.0,
            0.5,
            5.0 / 44.0,
            1.0 / 66.0,
            1.0 / 792.0,
            1.0 / 15840.0,
            1.0 / 665280.0,
        ];
        for (a, b) in c.iter().zip(expected) {
            assert!((a - b).abs() <= 4.0 * f64::EPSILON * b);
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let a = Matrix::from_rows(&[[-1.0, 1.0], [1.0, -1.0]]).unwrap();
        assert_eq!(expm_apply(&a, &[2.0, 1.0], 0.0).unwrap(), vec![2.0, 1.0]);
    }

    #[test]
    fn scalar_exponential() {
        let a = Matrix::from_rows(&[[-3.0]]).unwrap();
        let v = expm_apply(&a, &[1.0], 2.5).unwrap()[0];
        assert!((v - (-7.5f64).exp()).abs() <= 1e-13 * (-7.5f64).exp());
    }

    #[test]
    fn rotation_generator() {
        let a = Matrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap();
        let t = 1.3;
        let v = expm_apply(&a, &[1.0, 0.0], t).unwrap();
        assert!((v[0] - t.cos()).abs() < 1e-13);
        assert!((v[1] - t.sin()).abs() < 1e-13);
    }

    #[test]
    fn overflow_is_reported() {
        let a = Matrix::from_rows(&[[800.0]]).unwrap();
        assert!(matches!(
            expm_apply(&a, &[1.0], 1.0),
            Err(LinalgError::Overflow)
        ));
    }

    #[test]
    fn negative_time_rejected() {
        let a = Matrix::identity(1);
        assert!(expm_apply(&a, &[1.0], -1.0).is_err());
    }
}
