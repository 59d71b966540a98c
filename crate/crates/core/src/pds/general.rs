use std::fmt;

use super::{Pds, PdsError};
use crate::linalg::Matrix;

type VectorField = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A production–destruction system given by production terms `f^[P](y) ≥ 0`
/// and destruction rates `d(y) ≥ 0`, with `f^[D]_j(y) = d_j(y)·y_j`.
///
/// Rates declared `ratio_safe` are finite at states with zero components, so
/// the GeCo sum `Σ_j d_j(y)` may be evaluated on the boundary of the positive
/// orthant. Otherwise any zero component is a contract violation.
pub struct GeneralPds {
    dim: usize,
    production: VectorField,
    destruction_rate: VectorField,
    ratio_safe: bool,
    invariant_rows: Option<Matrix>,
}

impl GeneralPds {
    pub fn new<P, D>(dim: usize, production: P, destruction_rate: D) -> Self
    where
        P: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        D: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            dim,
            production: Box::new(production),
            destruction_rate: Box::new(destruction_rate),
            ratio_safe: false,
            invariant_rows: None,
        }
    }

    pub fn ratio_safe(mut self, safe: bool) -> Self {
        self.ratio_safe = safe;
        self
    }

    /// Declare linear invariants; each row must have length `dim`.
    pub fn with_invariants(mut self, rows: Matrix) -> Result<Self, PdsError> {
        if rows.cols() != self.dim {
            return Err(PdsError::Shape(format!(
                "invariant rows have {} columns, model has dimension {}",
                rows.cols(),
                self.dim
            )));
        }
        self.invariant_rows = Some(rows);
        Ok(self)
    }

    pub fn production(&self, y: &[f64]) -> Vec<f64> {
        (self.production)(y)
    }

    pub fn destruction_rate(&self, y: &[f64]) -> Vec<f64> {
        (self.destruction_rate)(y)
    }
}

impl fmt::Debug for GeneralPds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralPds")
            .field("dim", &self.dim)
            .field("ratio_safe", &self.ratio_safe)
            .field("invariant_rows", &self.invariant_rows)
            .finish_non_exhaustive()
    }
}

impl Pds for GeneralPds {
    fn dim(&self) -> usize {
        self.dim
    }

    fn rhs(&self, y: &[f64]) -> Vec<f64> {
        let p = self.production(y);
        let d = self.destruction_rate(y);
        p.iter()
            .zip(&d)
            .zip(y)
            .map(|((p, d), y)| p - d * y)
            .collect()
    }

    fn destruction_rate_sum(&self, y: &[f64]) -> Result<f64, PdsError> {
        if let Some(j) = y.iter().position(|&v| !(v >= 0.0)) {
            return Err(PdsError::Contract(format!(
                "component {j} is negative or NaN ({})",
                y[j]
            )));
        }
        if !self.ratio_safe {
            if let Some(j) = y.iter().position(|&v| v == 0.0) {
                return Err(PdsError::Contract(format!(
                    "component {j} is zero and the destruction rates are not declared ratio-safe"
                )));
            }
        }
        let d = self.destruction_rate(y);
        if let Some(j) = d.iter().position(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(PdsError::Contract(format!(
                "destruction rate {j} is {}",
                d[j]
            )));
        }
        Ok(d.iter().sum())
    }

    fn invariant_rows(&self) -> Option<&Matrix> {
        self.invariant_rows.as_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay_chain() -> GeneralPds {
        // y1 -> y2 with rate y1·y2 (nonlinear), total mass conserved
        GeneralPds::new(2, |y| vec![0.0, y[0] * y[1]], |y| vec![y[1], 0.0])
    }

    #[test]
    fn rhs_is_production_minus_destruction() {
        let m = decay_chain();
        assert_eq!(m.rhs(&[2.0, 3.0]), vec![-6.0, 6.0]);
    }

    #[test]
    fn zero_component_needs_ratio_safe_rates() {
        let m = decay_chain();
        assert!(matches!(
            m.destruction_rate_sum(&[0.0, 1.0]),
            Err(PdsError::Contract(_))
        ));
        let m = decay_chain().ratio_safe(true);
        assert_eq!(m.destruction_rate_sum(&[0.0, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn negative_rates_rejected() {
        let m = GeneralPds::new(1, |_| vec![0.0], |_| vec![-1.0]);
        assert!(m.destruction_rate_sum(&[1.0]).is_err());
    }

    #[test]
    fn invariant_width_checked() {
        assert!(decay_chain()
            .with_invariants(Matrix::from_rows(&[[1.0, 1.0, 1.0]]).unwrap())
            .is_err());
        let m = decay_chain()
            .with_invariants(Matrix::from_rows(&[[1.0, 1.0]]).unwrap())
            .unwrap();
        assert_eq!(m.invariant_rows().unwrap().rows(), 1);
    }
}
