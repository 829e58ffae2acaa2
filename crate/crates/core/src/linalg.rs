//! Small dense linear-algebra kernels used by the rate computations.
//!
//! Everything here is deliberately hand-rolled: the alias covariance matrices
//! are at most 8×8, the finite-window covariance oracle must stay independent
//! of the spectral code paths (and of any shared factorization library), and
//! the Jacobi eigensolver mirrors the derivation it supports.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// In-place Cholesky factorization of a symmetric positive-definite matrix in
/// row-major order; returns the log-determinant. `None` if a pivot fails.
fn cholesky_logdet_once(a: &mut [f64], n: usize) -> Option<f64> {
    let mut logdet = 0.0;
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let l = d.sqrt();
        a[j * n + j] = l;
        logdet += 2.0 * l.ln();
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / l;
        }
    }
    Some(logdet)
}

/// Log-determinant of a symmetric positive-definite matrix via Cholesky.
///
/// If the factorization fails, retries with escalating diagonal jitter
/// (1e-12·mean-diagonal × 10^k, k = 0..=3); if the matrix still fails, the
/// attempted regularization is reported in `IllConditioned`.
pub(crate) fn cholesky_logdet(matrix: &[f64], n: usize) -> Result<f64> {
    debug_assert_eq!(matrix.len(), n * n);
    let mut work = matrix.to_vec();
    if let Some(v) = cholesky_logdet_once(&mut work, n) {
        return Ok(v);
    }
    let mean_diag = (0..n).map(|i| matrix[i * n + i].abs()).sum::<f64>() / (n as f64);
    let mut jitter = 1e-12 * mean_diag.max(1e-300);
    for _ in 0..=3 {
        work.copy_from_slice(matrix);
        for i in 0..n {
            work[i * n + i] += jitter;
        }
        if let Some(v) = cholesky_logdet_once(&mut work, n) {
            return Ok(v);
        }
        jitter *= 10.0;
    }
    Err(Error::IllConditioned {
        regularization: jitter / 10.0,
    })
}

/// LU factorization with partial pivoting of a small dense complex matrix.
/// Holds the packed factors and the permutation sign.
pub(crate) struct ComplexLu {
    n: usize,
    lu: Vec<Complex64>,
    pivots: Vec<usize>,
    sign: f64,
}

impl ComplexLu {
    /// Factors `a` (row-major, n×n). Returns `None` on an exactly/nearly
    /// singular pivot (relative to the largest entry).
    pub fn factor(a: &[Complex64], n: usize) -> Option<Self> {
        debug_assert_eq!(a.len(), n * n);
        let mut lu = a.to_vec();
        let mut pivots = vec![0usize; n];
        let mut sign = 1.0;
        let scale = a.iter().fold(0.0f64, |acc, v| acc.max(v.norm())).max(1e-300);
        for col in 0..n {
            let (mut best, mut best_mag) = (col, lu[col * n + col].norm());
            for row in col + 1..n {
                let mag = lu[row * n + col].norm();
                if mag > best_mag {
                    best = row;
                    best_mag = mag;
                }
            }
            if best_mag <= scale * 1e-14 {
                return None;
            }
            pivots[col] = best;
            if best != col {
                for j in 0..n {
                    lu.swap(col * n + j, best * n + j);
                }
                sign = -sign;
            }
            let inv_pivot = Complex64::new(1.0, 0.0) / lu[col * n + col];
            for row in col + 1..n {
                let factor = lu[row * n + col] * inv_pivot;
                lu[row * n + col] = factor;
                for j in col + 1..n {
                    let sub = factor * lu[col * n + j];
                    lu[row * n + j] -= sub;
                }
            }
        }
        Some(Self {
            n,
            lu,
            pivots,
            sign,
        })
    }

    /// Determinant: product of pivots times the permutation sign.
    pub fn det(&self) -> Complex64 {
        let mut d = Complex64::new(self.sign, 0.0);
        for i in 0..self.n {
            d *= self.lu[i * self.n + i];
        }
        d
    }

    /// Solves A·x = b.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x = b.to_vec();
        for col in 0..n {
            x.swap(col, self.pivots[col]);
            for row in col + 1..n {
                let sub = self.lu[row * n + col] * x[col];
                x[row] -= sub;
            }
        }
        for col in (0..n).rev() {
            x[col] /= self.lu[col * n + col];
            for row in 0..col {
                let sub = self.lu[row * n + col] * x[col];
                x[row] -= sub;
            }
        }
        x
    }
}

/// Full eigen-decomposition of a small symmetric matrix by the cyclic Jacobi
/// method. Returns (eigenvalues, eigenvectors-as-columns), unsorted.
///
/// Sweeps run until the off-diagonal Frobenius norm drops below 1e-12 times
/// the matrix norm (or 64 sweeps). Deterministic for a fixed input.
pub(crate) fn jacobi_eigen(matrix: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    debug_assert_eq!(matrix.len(), n * n);
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    for _sweep in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off < 1e-12 * norm {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eigenvalues = (0..n).map(|i| a[i * n + i]).collect();
    (eigenvalues, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_logdet_of_diagonal() {
        let m = vec![4.0, 0.0, 0.0, 0.25];
        let ld = cholesky_logdet(&m, 2).unwrap();
        assert!((ld - (4.0f64 * 0.25).ln()).abs() < 1e-14);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = vec![1.0, 2.0, 2.0, 1.0]; // eigenvalues 3, −1
        assert!(matches!(
            cholesky_logdet(&m, 2),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn complex_lu_det_and_solve() {
        // A = [[2, i], [-i, 3]] is Hermitian positive definite, det = 5.
        let i = Complex64::new(0.0, 1.0);
        let a = vec![
            Complex64::new(2.0, 0.0),
            i,
            -i,
            Complex64::new(3.0, 0.0),
        ];
        let lu = ComplexLu::factor(&a, 2).unwrap();
        let d = lu.det();
        assert!((d.re - 5.0).abs() < 1e-14 && d.im.abs() < 1e-14);

        let b = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let x = lu.solve(&b);
        // Verify A·x = b.
        let r0 = a[0] * x[0] + a[1] * x[1] - b[0];
        let r1 = a[2] * x[0] + a[3] * x[1] - b[1];
        assert!(r0.norm() < 1e-14 && r1.norm() < 1e-14);
    }

    #[test]
    fn complex_lu_detects_singular() {
        let a = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(4.0, 0.0),
        ];
        assert!(ComplexLu::factor(&a, 2).is_none());
    }

    #[test]
    fn jacobi_recovers_known_spectrum() {
        // Symmetric tridiagonal Toeplitz [[2,1,0],[1,2,1],[0,1,2]]:
        // eigenvalues 2 + 2cos(kπ/4) = 2±√2 and 2.
        let m = vec![2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0];
        let (mut vals, _) = jacobi_eigen(&m, 3);
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expect = [2.0 - 2f64.sqrt(), 2.0, 2.0 + 2f64.sqrt()];
        for (v, e) in vals.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12, "got {v}, want {e}");
        }
    }

    #[test]
    fn jacobi_leaves_diagonal_untouched() {
        let m = vec![3.0, 0.0, 0.0, 1.0];
        let (vals, vecs) = jacobi_eigen(&m, 2);
        assert_eq!(vals, vec![3.0, 1.0]);
        assert_eq!(vecs, vec![1.0, 0.0, 0.0, 1.0]);
    }
}
