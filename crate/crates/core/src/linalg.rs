//! Small dense complex linear algebra.
//!
//! Everything in this crate works with matrices of a few dozen rows at most,
//! so the implementations favor clarity and determinism over speed: Cholesky
//! by the classical recurrence, determinants by partially pivoted LU, and a
//! one-sided Jacobi SVD. All routines are allocation-only (`no_std` + `alloc`)
//! and bit-reproducible across runs.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Complex64>,
}

/// Error type for the factorizations in this module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinalgError {
    /// Cholesky pivot was not strictly positive.
    NotPositiveDefinite,
    /// Matrix dimensions do not match the operation.
    ShapeMismatch,
    /// Jacobi sweep limit reached without convergence.
    NoConvergence,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::NotPositiveDefinite => write!(f, "matrix is not positive definite"),
            LinalgError::ShapeMismatch => write!(f, "matrix shape mismatch"),
            LinalgError::NoConvergence => write!(f, "iteration failed to converge"),
        }
    }
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        Mat::from_fn(r, c, |i, j| rows[i][j])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Mat {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Deviation from Hermitian symmetry, `max |a_ij - conj(a_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }
}

impl core::ops::Index<(usize, usize)> for Mat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Cholesky factor `L` (lower triangular) of a Hermitian positive definite
/// matrix, `A = L L^H`.
pub fn cholesky(a: &Mat) -> Result<Mat, LinalgError> {
    if a.rows != a.cols {
        return Err(LinalgError::ShapeMismatch);
    }
    let n = a.rows;
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(LinalgError::NotPositiveDefinite);
        }
        let dj = libm::sqrt(d);
        l[(j, j)] = Complex64::new(dj, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / dj;
        }
    }
    Ok(l)
}

/// Inverse of a lower triangular matrix by forward substitution.
pub fn invert_lower(l: &Mat) -> Mat {
    let n = l.rows;
    let mut inv = Mat::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = Complex64::new(1.0, 0.0) / l[(j, j)];
        for i in j + 1..n {
            let mut s = Complex64::new(0.0, 0.0);
            for k in j..i {
                s += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / l[(i, i)];
        }
    }
    inv
}

/// Determinant by LU with partial pivoting.
pub fn det(a: &Mat) -> Complex64 {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut lu = a.clone();
    let mut sign = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut piv = k;
        let mut best = lu[(k, k)].norm();
        for i in k + 1..n {
            let v = lu[(i, k)].norm();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
            sign = -sign;
        }
        let d = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / d;
            lu[(i, k)] = f;
            for j in k + 1..n {
                let s = f * lu[(k, j)];
                lu[(i, j)] -= s;
            }
        }
    }
    let mut prod = sign;
    for k in 0..n {
        prod *= lu[(k, k)];
    }
    prod
}

/// Result of a singular value decomposition `A = U diag(s) V^H`.
pub struct Svd {
    pub u: Mat,
    pub s: Vec<f64>,
    pub v: Mat,
}

/// One-sided Jacobi SVD. `A` may have any shape; singular values are sorted
/// in decreasing order. Thin factors: `u` is `rows x r`, `v` is `cols x r`
/// with `r = min(rows, cols)`.
pub fn svd(a: &Mat) -> Result<Svd, LinalgError> {
    if a.rows < a.cols {
        // Work on the transpose and swap factors.
        let t = svd(&a.adjoint())?;
        return Ok(Svd { u: t.v, s: t.s, v: t.u });
    }
    let m = a.rows;
    let n = a.cols;
    let mut w = a.clone(); // columns converge to U * diag(s)
    let mut v = Mat::identity(n);
    let scale = w.max_abs().max(1e-300);
    let tol = 1e-14 * scale * scale;
    let max_sweeps = 60;
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut app = 0.0f64;
                let mut aqq = 0.0f64;
                let mut apq = Complex64::new(0.0, 0.0);
                for i in 0..m {
                    app += w[(i, p)].norm_sqr();
                    aqq += w[(i, q)].norm_sqr();
                    apq += w[(i, p)].conj() * w[(i, q)];
                }
                let off = apq.norm();
                if off <= tol || off <= 1e-15 * libm::sqrt(app * aqq) {
                    continue;
                }
                rotated = true;
                // De-phase column q so the Gram off-diagonal becomes real
                // positive, then apply a real Jacobi rotation to zero it.
                let phase_conj = (apq / off).conj();
                let tau = (aqq - app) / (2.0 * off);
                let t = if tau >= 0.0 {
                    1.0 / (tau + libm::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = phase_conj * w[(i, q)];
                    w[(i, p)] = c * wp - s * wq;
                    w[(i, q)] = s * wp + c * wq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = phase_conj * v[(i, q)];
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence);
    }
    // Column norms are the singular values; normalize to get U.
    let mut order: Vec<usize> = (0..n).collect();
    let mut snorm = vec![0.0f64; n];
    for (j, nj) in snorm.iter_mut().enumerate() {
        let mut s2 = 0.0;
        for i in 0..m {
            s2 += w[(i, j)].norm_sqr();
        }
        *nj = libm::sqrt(s2);
    }
    order.sort_by(|&x, &y| snorm[y].partial_cmp(&snorm[x]).unwrap());
    let mut u = Mat::zeros(m, n);
    let mut vv = Mat::zeros(n, n);
    let mut sv = vec![0.0f64; n];
    for (jj, &j) in order.iter().enumerate() {
        sv[jj] = snorm[j];
        let inv = if snorm[j] > 0.0 { 1.0 / snorm[j] } else { 0.0 };
        for i in 0..m {
            u[(i, jj)] = w[(i, j)] * inv;
        }
        for i in 0..n {
            vv[(i, jj)] = v[(i, j)];
        }
    }
    Ok(Svd { u, s: sv, v: vv })
}

/// Numerical rank: number of singular values above `cutoff_rel * s_max`.
pub fn rank_from_singular_values(s: &[f64], cutoff_rel: f64) -> usize {
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > cutoff_rel * smax).count()
}

/// Minimum-norm least squares solution of `A x = b` via the SVD, discarding
/// singular values below `cutoff_rel * s_max`. Returns `(x, residual_2norm)`.
pub fn lstsq(a: &Mat, b: &[Complex64], cutoff_rel: f64) -> Result<(Vec<Complex64>, f64), LinalgError> {
    if a.rows != b.len() {
        return Err(LinalgError::ShapeMismatch);
    }
    let Svd { u, s, v } = svd(a)?;
    let r = s.len();
    let smax = s.first().copied().unwrap_or(0.0);
    let mut x = vec![Complex64::new(0.0, 0.0); a.cols];
    for j in 0..r {
        if s[j] <= cutoff_rel * smax || s[j] == 0.0 {
            continue;
        }
        // coefficient <u_j, b> / s_j
        let mut c = Complex64::new(0.0, 0.0);
        for i in 0..a.rows {
            c += u[(i, j)].conj() * b[i];
        }
        c /= s[j];
        for i in 0..a.cols {
            x[i] += v[(i, j)] * c;
        }
    }
    // residual
    let mut res2 = 0.0f64;
    for i in 0..a.rows {
        let mut ax = Complex64::new(0.0, 0.0);
        for j in 0..a.cols {
            ax += a[(i, j)] * x[j];
        }
        res2 += (ax - b[i]).norm_sqr();
    }
    Ok((x, libm::sqrt(res2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = Mat::from_rows(&[
            vec![c(4.0, 0.0), c(1.0, 1.0)],
            vec![c(1.0, -1.0), c(3.0, 0.0)],
        ]);
        let l = cholesky(&a).unwrap();
        let r = l.mul(&l.adjoint());
        assert!(r.max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Mat::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(1.0, 0.0)],
        ]);
        assert_eq!(cholesky(&a), Err(LinalgError::NotPositiveDefinite));
    }

    #[test]
    fn det_of_known_matrix() {
        let a = Mat::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 0.0), c(3.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, -1.0), c(0.0, 0.0), c(2.0, 0.0)],
        ]);
        // Cofactor expansion along the first row gives 3 - 2i.
        let d = det(&a);
        assert!((d - c(3.0, -2.0)).norm() < 1e-12);
    }

    #[test]
    fn svd_reconstructs_and_is_orthogonal() {
        let a = Mat::from_fn(5, 3, |i, j| {
            c(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64 - 1.0)
        });
        let Svd { u, s, v } = svd(&a).unwrap();
        // A ≈ U diag(s) V^H
        let mut us = u.clone();
        for i in 0..us.rows {
            for j in 0..us.cols {
                us[(i, j)] *= s[j];
            }
        }
        let back = us.mul(&v.adjoint());
        assert!(back.max_abs_diff(&a) < 1e-10);
        // U^H U = I, V^H V = I
        assert!(u.adjoint().mul(&u).max_abs_diff(&Mat::identity(3)) < 1e-10);
        assert!(v.adjoint().mul(&v).max_abs_diff(&Mat::identity(3)) < 1e-10);
        // detect the obvious rank
        assert_eq!(rank_from_singular_values(&s, 1e-8), 3);
    }

    #[test]
    fn svd_rank_deficient() {
        // rank-1 outer product
        let a = Mat::from_fn(4, 3, |i, j| c((i + 1) as f64, 0.0) * c(0.5 * (j as f64 + 1.0), 0.2));
        let Svd { s, .. } = svd(&a).unwrap();
        assert_eq!(rank_from_singular_values(&s, 1e-8), 1);
    }

    #[test]
    fn lstsq_solves_exact_system() {
        let a = Mat::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let xtrue = [c(1.0, -1.0), c(2.0, 0.5)];
        let mut b = vec![c(0.0, 0.0); 3];
        for i in 0..3 {
            for j in 0..2 {
                b[i] += a[(i, j)] * xtrue[j];
            }
        }
        let (x, res) = lstsq(&a, &b, 1e-12).unwrap();
        assert!(res < 1e-12);
        assert!((x[0] - xtrue[0]).norm() < 1e-12);
        assert!((x[1] - xtrue[1]).norm() < 1e-12);
    }
}
