//! Eigenvalues of small dense real matrices.
//!
//! Householder reduction to upper Hessenberg form followed by the implicit
//! double-shift (Francis) QR iteration, deflating 1x1 and 2x2 blocks off the
//! bottom of the active window.

use num_complex::Complex64;

use super::{LinalgError, Matrix};

/// Largest dimension accepted by [`eigenvalues`].
pub const MAX_DIM: usize = 64;

/// Eigenvalues of a real matrix with solver diagnostics.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<Complex64>,
    /// Absolute subdiagonal threshold used for deflation.
    pub convergence_tol: f64,
    pub iterations_used: usize,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Values with modulus above `tol`.
    pub fn nonzero(&self, tol: f64) -> Vec<Complex64> {
        self.values
            .iter()
            .copied()
            .filter(|z| z.norm() > tol)
            .collect()
    }

    /// Number of values with modulus at most `tol`.
    pub fn count_zero(&self, tol: f64) -> usize {
        self.values.iter().filter(|z| z.norm() <= tol).count()
    }
}

/// All eigenvalues of the square matrix `a` (N ≤ 64).
pub fn eigenvalues(a: &Matrix) -> Result<Spectrum, LinalgError> {
    let n = a.rows();
    if !a.is_square() {
        return Err(LinalgError::Shape(format!(
            "eigenvalues need a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if n > MAX_DIM {
        return Err(LinalgError::Shape(format!(
            "eigenvalues support N <= {MAX_DIM}, got {n}"
        )));
    }
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let convergence_tol = 1e-12 * a.norm_fro();
    if n == 0 {
        return Ok(Spectrum {
            values: Vec::new(),
            convergence_tol,
            iterations_used: 0,
        });
    }
    let mut h = hessenberg(a);
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    let iterations_used = hqr(&mut h, &mut values, convergence_tol, 100 * n)?;
    Ok(Spectrum {
        values,
        convergence_tol,
        iterations_used,
    })
}

/// Orthogonal similarity reduction to upper Hessenberg form.
fn hessenberg(a: &Matrix) -> Matrix {
    let n = a.rows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n)
            .map(|i| h[(i, k)] * h[(i, k)])
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if h[(k + 1, k)] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H <- P H with P = I - 2 v v^T / (v^T v) acting on rows k+1..n
        for j in 0..n {
            let s: f64 = (0..v.len()).map(|r| v[r] * h[(k + 1 + r, j)]).sum::<f64>() * 2.0 / vnorm2;
            for r in 0..v.len() {
                h[(k + 1 + r, j)] -= s * v[r];
            }
        }
        // H <- H P
        for i in 0..n {
            let s: f64 = (0..v.len()).map(|c| h[(i, k + 1 + c)] * v[c]).sum::<f64>() * 2.0 / vnorm2;
            for c in 0..v.len() {
                h[(i, k + 1 + c)] -= s * v[c];
            }
        }
        for i in k + 2..n {
            h[(i, k)] = 0.0;
        }
    }
    h
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix; writes eigenvalues
/// into `wri` and returns the number of QR sweeps performed.
fn hqr(
    a: &mut Matrix,
    wri: &mut [Complex64],
    deflation_tol: f64,
    max_sweeps: usize,
) -> Result<usize, LinalgError> {
    let n = a.rows();
    let eps = f64::EPSILON;
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    let mut sweeps = 0usize;
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let (mut p, mut q, mut r, mut s, mut w, mut x, mut y, mut z);
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l > 0 {
                s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() <= eps * s || a[(l, l - 1)].abs() <= deflation_tol {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = a[(nu, nu)];
            if l == nu {
                wri[nu] = Complex64::new(x + t, 0.0);
                nn -= 1;
            } else {
                y = a[(nu - 1, nu - 1)];
                w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
                if l == nu - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wri[nu - 1] = Complex64::new(x + z, 0.0);
                        wri[nu] = Complex64::new(x + z, 0.0);
                        if z != 0.0 {
                            wri[nu] = Complex64::new(x - w / z, 0.0);
                        }
                    } else {
                        wri[nu] = Complex64::new(x + p, -z);
                        wri[nu - 1] = wri[nu].conj();
                    }
                    nn -= 2;
                } else {
                    if sweeps >= max_sweeps {
                        return Err(LinalgError::NoConvergence { iterations: sweeps });
                    }
                    if its == 10 || its == 20 {
                        // exceptional shift
                        t += x;
                        for i in 0..=nu {
                            a[(i, i)] -= x;
                        }
                        s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    sweeps += 1;
                    let mut m = nu - 2;
                    loop {
                        z = a[(m, m)];
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / a[(m + 1, m)] + a[(m, m + 1)];
                        q = a[(m + 1, m + 1)] - z - r - s;
                        r = a[(m + 2, m + 1)];
                        s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                        let v =
                            p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                        if u <= eps * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m..nu - 1 {
                        a[(i + 2, i)] = 0.0;
                        if i != m {
                            a[(i + 2, i - 1)] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nu {
                        if k != m {
                            p = a[(k, k - 1)];
                            q = a[(k + 1, k - 1)];
                            r = 0.0;
                            if k + 1 != nu {
                                r = a[(k + 2, k - 1)];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a[(k, k - 1)] = -a[(k, k - 1)];
                                }
                            } else {
                                a[(k, k - 1)] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nu {
                                p = a[(k, j)] + q * a[(k + 1, j)];
                                if k + 1 != nu {
                                    p += r * a[(k + 2, j)];
                                    a[(k + 2, j)] -= p * z;
                                }
                                a[(k + 1, j)] -= p * y;
                                a[(k, j)] -= p * x;
                            }
                            let mmin = if nu < k + 3 { nu } else { k + 3 };
                            for i in l..=mmin {
                                p = x * a[(i, k)] + y * a[(i, k + 1)];
                                if k + 1 != nu {
                                    p += z * a[(i, k + 2)];
                                    a[(i, k + 2)] -= p * r;
                                }
                                a[(i, k + 1)] -= p * q;
                                a[(i, k)] -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 0 || l + 1 >= nn as usize {
                break;
            }
        }
    }
    Ok(sweeps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        v
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let s = eigenvalues(&Matrix::identity(3)).unwrap();
        assert_eq!(s.len(), 3);
        for z in &s.values {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn rotation_block_gives_conjugate_pair() {
        let a = Matrix::from_rows(&[[0.0, -2.0], [2.0, 0.0]]).unwrap();
        let v = sorted(eigenvalues(&a).unwrap().values);
        assert!((v[0] - Complex64::new(0.0, -2.0)).norm() < 1e-14);
        assert!((v[1] - Complex64::new(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn upper_triangular_reads_diagonal() {
        let a = Matrix::from_rows(&[
            [3.0, 1.0, 4.0, 1.0],
            [0.0, -5.0, 9.0, 2.0],
            [0.0, 0.0, 6.0, 5.0],
            [0.0, 0.0, 0.0, -3.0],
        ])
        .unwrap();
        let v = sorted(eigenvalues(&a).unwrap().values);
        for (z, e) in v.iter().zip([-5.0, -3.0, 3.0, 6.0]) {
            assert!((z.re - e).abs() < 1e-12 && z.im.abs() < 1e-12);
        }
    }

    #[test]
    fn companion_matrix_roots() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let a = Matrix::from_rows(&[[6.0, -11.0, 6.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        let v = sorted(eigenvalues(&a).unwrap().values);
        for (z, e) in v.iter().zip([1.0, 2.0, 3.0]) {
            assert!((z.re - e).abs() < 1e-10 && z.im.abs() < 1e-10, "{z}");
        }
    }

    #[test]
    fn rejects_non_square_and_non_finite() {
        assert!(eigenvalues(&Matrix::zeros(2, 3)).is_err());
        let a = Matrix::from_rows(&[[f64::NAN]]).unwrap();
        assert!(matches!(eigenvalues(&a), Err(LinalgError::NonFinite)));
    }
}
