use num_complex::Complex64;

use super::{eigenvalues, nullspace, Matrix, Spectrum, DEFAULT_RANK_TOL};

/// Relative tolerance (times `‖A‖_F`) for treating an eigenvalue as zero or
/// a real part as non-positive.
pub const SPECTRUM_ZERO_TOL: f64 = 1e-9;

/// Structural checks for `y' = Ay` with `A` Metzler, a semisimple zero
/// eigenvalue and spectrum in the closed left half-plane.
#[derive(Clone, Debug)]
pub struct SystemReport {
    pub metzler: bool,
    pub nonzero: bool,
    /// Geometric multiplicity of 0, `dim ker(A)`.
    pub kernel_dim: usize,
    /// Eigenvalues within tolerance of 0.
    pub zero_algebraic_multiplicity: usize,
    pub left_half_plane: bool,
    /// At least one negative diagonal entry.
    pub proper_metzler: bool,
    pub spectrum: Option<Spectrum>,
    pub diagnostics: Vec<String>,
}

impl SystemReport {
    pub fn semisimple_zero(&self) -> bool {
        self.kernel_dim >= 1 && self.kernel_dim == self.zero_algebraic_multiplicity
    }

    /// Every flag of the linear test class holds.
    pub fn in_class(&self) -> bool {
        self.metzler
            && self.nonzero
            && self.semisimple_zero()
            && self.left_half_plane
            && self.proper_metzler
    }
}

pub fn validate_system(a: &Matrix) -> SystemReport {
    let mut diagnostics = Vec::new();
    if !a.is_square() {
        diagnostics.push(format!("matrix is {}x{}, not square", a.rows(), a.cols()));
        return SystemReport {
            metzler: false,
            nonzero: false,
            kernel_dim: 0,
            zero_algebraic_multiplicity: 0,
            left_half_plane: false,
            proper_metzler: false,
            spectrum: None,
            diagnostics,
        };
    }
    let n = a.rows();
    let mut metzler = true;
    for i in 0..n {
        for j in 0..n {
            if i != j && a[(i, j)] < 0.0 {
                metzler = false;
                diagnostics.push(format!(
                    "negative off-diagonal entry a[{i}][{j}] = {}",
                    a[(i, j)]
                ));
            }
        }
    }
    let nonzero = a.as_slice().iter().any(|&x| x != 0.0);
    let proper_metzler = metzler && a.diagonal().iter().any(|&d| d < 0.0);
    let kernel_dim = nullspace(a, DEFAULT_RANK_TOL).len();

    let tol = SPECTRUM_ZERO_TOL * a.norm_fro().max(f64::MIN_POSITIVE);
    let (spectrum, zero_mult, left) = match eigenvalues(a) {
        Ok(s) => {
            let zeros = s.count_zero(tol);
            let left = s.values.iter().all(|z: &Complex64| z.re <= tol);
            if !left {
                diagnostics.push("spectrum has an eigenvalue with positive real part".into());
            }
            (Some(s), zeros, left)
        }
        Err(e) => {
            diagnostics.push(format!("eigenvalue computation failed: {e}"));
            (None, 0, false)
        }
    };
    if kernel_dim != zero_mult {
        diagnostics.push(format!(
            "dim ker(A) = {kernel_dim} but zero has algebraic multiplicity {zero_mult}"
        ));
    }
    SystemReport {
        metzler,
        nonzero,
        kernel_dim,
        zero_algebraic_multiplicity: zero_mult,
        left_half_plane: left,
        proper_metzler,
        spectrum,
        diagnostics,
    }
}

/// Every eigenvalue lies in the closed disk centred at `r = min_j a_jj` with
/// radius `|r|`, up to `1e-10·‖A‖∞`.
pub fn metzler_disk_check(a: &Matrix, spectrum: &Spectrum) -> bool {
    let r = a.diagonal().into_iter().fold(f64::INFINITY, f64::min);
    let tol = 1e-10 * a.norm_inf();
    let centre = Complex64::new(r, 0.0);
    spectrum
        .values
        .iter()
        .all(|z| (z - centre).norm() <= r.abs() + tol)
}
