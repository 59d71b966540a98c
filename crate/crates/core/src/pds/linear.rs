use super::{Pds, PdsError};
use crate::linalg::{left_nullspace, lu_solve, nullspace, Matrix, DEFAULT_RANK_TOL};

/// Split a Metzler matrix as `A = S⁺ − S⁻` with `S⁻` diagonal,
/// `(S⁻)_jj = max(−a_jj, 0)` and `S⁺ = A + S⁻ ≥ 0`.
pub fn split_metzler(a: &Matrix) -> Result<(Matrix, Matrix), PdsError> {
    if !a.is_square() {
        return Err(PdsError::Shape(format!(
            "matrix is {}x{}, not square",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(PdsError::Shape("matrix has non-finite entries".into()));
    }
    let n = a.rows();
    for i in 0..n {
        for j in 0..n {
            if i != j && a[(i, j)] < 0.0 {
                return Err(PdsError::NotMetzler {
                    row: i,
                    col: j,
                    value: a[(i, j)],
                });
            }
        }
    }
    let s_minus = Matrix::from_diagonal(
        &a.diagonal()
            .iter()
            .map(|&d| (-d).max(0.0))
            .collect::<Vec<_>>(),
    );
    let mut s_plus = a.clone();
    for j in 0..n {
        s_plus[(j, j)] += s_minus[(j, j)];
    }
    Ok((s_plus, s_minus))
}

/// The linear system `y' = Ay` with `A` Metzler.
#[derive(Clone, Debug)]
pub struct LinearPds {
    a: Matrix,
    s_plus: Matrix,
    s_minus: Matrix,
    invariant_rows: Matrix,
    kernel_basis: Vec<Vec<f64>>,
    trace_s_minus: f64,
}

impl LinearPds {
    pub fn new(a: Matrix) -> Result<Self, PdsError> {
        let (s_plus, s_minus) = split_metzler(&a)?;
        let invariant_rows = left_nullspace(&a, DEFAULT_RANK_TOL);
        let kernel_basis = nullspace(&a, DEFAULT_RANK_TOL);
        let trace_s_minus = s_minus.trace();
        Ok(Self {
            a,
            s_plus,
            s_minus,
            invariant_rows,
            kernel_basis,
            trace_s_minus,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn s_plus(&self) -> &Matrix {
        &self.s_plus
    }

    pub fn s_minus(&self) -> &Matrix {
        &self.s_minus
    }

    pub fn kernel_basis(&self) -> &[Vec<f64>] {
        &self.kernel_basis
    }

    pub fn trace_s_minus(&self) -> f64 {
        self.trace_s_minus
    }

    pub fn invariants(&self) -> &Matrix {
        &self.invariant_rows
    }
}

impl Pds for LinearPds {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn rhs(&self, y: &[f64]) -> Vec<f64> {
        self.a.mul_vec(y)
    }

    /// `trace(S⁻)`, independent of `y`: `Σ_j (S⁻y)_j / y_j` collapses to the
    /// trace identically, so no division is performed.
    fn destruction_rate_sum(&self, _y: &[f64]) -> Result<f64, PdsError> {
        Ok(self.trace_s_minus)
    }

    fn invariant_rows(&self) -> Option<&Matrix> {
        Some(&self.invariant_rows)
    }

    fn as_linear(&self) -> Option<&LinearPds> {
        Some(self)
    }
}

/// The steady state `y* ∈ ker(A)` sharing all linear invariants with `y0`.
///
/// With kernel basis `V` (N×k) and invariant rows `N` (k×N), solves the k×k
/// system `(N V) c = N y0` and returns `V c`.
pub fn steady_state_for(model: &LinearPds, y0: &[f64]) -> Result<Vec<f64>, PdsError> {
    let n = model.dim();
    if y0.len() != n {
        return Err(PdsError::Shape(format!(
            "initial state has length {}, model has dimension {n}",
            y0.len()
        )));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(PdsError::Shape(
            "initial state has non-finite entries".into(),
        ));
    }
    let basis = model.kernel_basis();
    let rows = model.invariants();
    let k = basis.len();
    if k == 0 {
        return Err(PdsError::Singular("kernel of A is trivial".into()));
    }
    if rows.rows() != k {
        return Err(PdsError::Singular(format!(
            "{} invariant rows for a {k}-dimensional kernel",
            rows.rows()
        )));
    }
    let mut gram = Matrix::zeros(k, k);
    for i in 0..k {
        for (j, v) in basis.iter().enumerate() {
            gram[(i, j)] = (0..n).map(|l| rows[(i, l)] * v[l]).sum();
        }
    }
    let rhs = Matrix::from_row_major(k, 1, rows.mul_vec(y0))?;
    let coeffs = lu_solve(&gram, &rhs).map_err(|_| {
        PdsError::Singular("kernel basis is degenerate with respect to the invariants".into())
    })?;
    let mut y_star = vec![0.0; n];
    for (j, v) in basis.iter().enumerate() {
        let c = coeffs[(j, 0)];
        for l in 0..n {
            y_star[l] += c * v[l];
        }
    }
    Ok(y_star)
}
