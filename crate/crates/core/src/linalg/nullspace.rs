use super::{vec_norm_inf, Matrix};

/// Default relative rank tolerance, scaled by `‖A‖∞` inside [`nullspace`].
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Basis of the numerical kernel of `a`.
///
/// Row reduction with partial pivoting; a column whose best remaining pivot
/// falls below `rank_tol·‖A‖∞` is treated as free. Each returned vector has
/// unit max-norm and its largest-magnitude entry is positive.
pub fn nullspace(a: &Matrix, rank_tol: f64) -> Vec<Vec<f64>> {
    let (rows, cols) = (a.rows(), a.cols());
    let threshold = rank_tol * a.norm_inf();
    let mut r = a.clone();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let (p, best) = (row..rows)
            .map(|i| (i, r[(i, col)].abs()))
            .fold((row, -1.0), |b, c| if c.1 > b.1 { c } else { b });
        if best <= threshold {
            for i in row..rows {
                r[(i, col)] = 0.0;
            }
            continue;
        }
        if p != row {
            for j in 0..cols {
                let tmp = r[(p, j)];
                r[(p, j)] = r[(row, j)];
                r[(row, j)] = tmp;
            }
        }
        let pv = r[(row, col)];
        for j in 0..cols {
            r[(row, j)] /= pv;
        }
        for i in 0..rows {
            if i == row {
                continue;
            }
            let factor = r[(i, col)];
            if factor != 0.0 {
                for j in 0..cols {
                    r[(i, j)] -= factor * r[(row, j)];
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }

    let free: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0.0; cols];
            v[f] = 1.0;
            for (prow, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -r[(prow, f)];
            }
            let big = v
                .iter()
                .copied()
                .fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
            let scale = if big == 0.0 { 1.0 } else { big };
            v.iter().map(|x| x / scale).collect()
        })
        .collect()
}

/// Kernel of `Aᵀ` stacked as rows: the linear invariants `n` with `nᵀA = 0`.
pub fn left_nullspace(a: &Matrix, rank_tol: f64) -> Matrix {
    let basis = nullspace(&a.transpose(), rank_tol);
    if basis.is_empty() {
        return Matrix::zeros(0, a.rows());
    }
    Matrix::from_rows(&basis).expect("kernel vectors share a length")
}

/// `‖Av‖∞ / (‖A‖∞‖v‖∞)`, the scaled kernel residual of `v`.
pub fn kernel_residual(a: &Matrix, v: &[f64]) -> f64 {
    let denom = a.norm_inf() * vec_norm_inf(v);
    if denom == 0.0 {
        return 0.0;
    }
    vec_norm_inf(&a.mul_vec(v)) / denom
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_trivial_kernel() {
        assert!(nullspace(&Matrix::identity(4), DEFAULT_RANK_TOL).is_empty());
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        assert_eq!(nullspace(&Matrix::zeros(3, 3), DEFAULT_RANK_TOL).len(), 3);
    }

    #[test]
    fn two_by_two_kernel_direction() {
        // a = 2, b = 3, c = 0.5
        let (a, b, c) = (2.0, 3.0, 0.5);
        let m = Matrix::from_rows(&[[-a * c, b * c], [a, -b]]).unwrap();
        let k = nullspace(&m, DEFAULT_RANK_TOL);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert!((v[0] / v[1] - b / a).abs() < 1e-14);
        assert!(kernel_residual(&m, v) < 1e-15);
        let left = left_nullspace(&m, DEFAULT_RANK_TOL);
        assert_eq!(left.rows(), 1);
        assert!((left[(0, 1)] / left[(0, 0)] - c).abs() < 1e-14);
    }

    #[test]
    fn rank_deficient_by_two() {
        let m = Matrix::from_rows(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [3.0, 6.0, 9.0]]).unwrap();
        let k = nullspace(&m, DEFAULT_RANK_TOL);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(kernel_residual(&m, v) < 1e-14);
            assert!((vec_norm_inf(v) - 1.0).abs() < 1e-15);
        }
    }
}
