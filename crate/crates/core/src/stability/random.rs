use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::StabilityError;
use crate::linalg::{validate_system, Matrix};
use crate::pds::LinearPds;

pub const MAX_REJECTIONS: usize = 100;
const ZERO_PROBABILITY: f64 = 0.3;

/// Seeded Metzler matrix with zero column sums passing every structural check
/// of the linear test class.
///
/// Off-diagonal entries are zero with probability 0.3 and otherwise uniform
/// on `[0, 1)`; the diagonal is minus the column sum. Candidates are drawn
/// from one ChaCha8 stream until [`validate_system`] accepts one.
pub fn random_system_8(seed: u64, n: usize) -> Result<LinearPds, StabilityError> {
    if n < 2 {
        return Err(StabilityError::Domain(format!(
            "random systems need N >= 2, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REJECTIONS {
        let mut a = Matrix::zeros(n, n);
        for j in 0..n {
            let mut column_sum = 0.0;
            for i in 0..n {
                if i != j && rng.gen::<f64>() >= ZERO_PROBABILITY {
                    let v: f64 = rng.gen();
                    a[(i, j)] = v;
                    column_sum += v;
                }
            }
            a[(j, j)] = -column_sum;
        }
        if validate_system(&a).in_class() {
            return Ok(LinearPds::new(a)?);
        }
    }
    Err(StabilityError::Domain(format!(
        "no admissible matrix after {MAX_REJECTIONS} draws (seed {seed}, N = {n})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_from_seed() {
        let a = random_system_8(7, 5).unwrap();
        let b = random_system_8(7, 5).unwrap();
        assert_eq!(a.matrix().as_slice(), b.matrix().as_slice());
        assert_ne!(
            random_system_8(8, 5).unwrap().matrix().as_slice(),
            a.matrix().as_slice()
        );
    }

    #[test]
    fn columns_sum_to_zero() {
        for seed in 0..20 {
            let m = random_system_8(seed, 2 + (seed as usize % 7)).unwrap();
            let a = m.matrix();
            for j in 0..a.cols() {
                let s: f64 = a.column(j).iter().sum();
                assert!(s.abs() <= 1e-15 * a.norm_one().max(1.0));
            }
            assert!(validate_system(a).in_class());
        }
    }

    #[test]
    fn dimension_one_rejected() {
        assert!(random_system_8(0, 1).is_err());
    }
}
