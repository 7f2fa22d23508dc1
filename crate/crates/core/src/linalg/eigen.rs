//! Symmetric eigendecomposition by cyclic Jacobi rotations, plus the
//! spectral quantities built on it.

use super::{Matrix, Vector};
use crate::error::{Error, Result};
use crate::tol;

/// Eigenvalues in non-increasing order with matching orthonormal
/// eigenvector columns.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl SymEigen {
    pub fn min(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `V * diag(f(lambda)) * V^T`.
    pub fn assemble(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = vec![0.0; n * n];
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * w;
                if vik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += vik * v[(j, k)];
                }
            }
        }
        Matrix::from_vec_unchecked(n, n, out)
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// The input is rejected if any entry of `M - M^T` exceeds
/// [`tol::SYMMETRY_TOL`], then symmetrized as `(M + M^T)/2` before the
/// sweeps. Convergence is declared once the off-diagonal Frobenius mass
/// drops below [`tol::JACOBI_CONVERGENCE`] times the input Frobenius norm,
/// which cyclic Jacobi reaches quadratically; a cap of
/// [`tol::JACOBI_MAX_SWEEPS`] sweeps guards against pathological input.
pub fn sym_eigen(m: &Matrix) -> Result<SymEigen> {
    let dev = m.max_asymmetry()?;
    if dev > tol::SYMMETRY_TOL {
        return Err(Error::NotSymmetric { max_dev: dev, tol: tol::SYMMETRY_TOL });
    }
    let work = m.symmetrized()?;
    let n = work.rows();
    let mut a: Vec<f64> = work.as_slice().to_vec();
    let mut v = Matrix::identity(n);

    let norm = work.frobenius_norm();
    let threshold = tol::JACOBI_CONVERGENCE * norm;
    let mut converged = norm == 0.0 || n == 1;

    for _sweep in 0..tol::JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = {
            let mut s = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    s += 2.0 * a[i * n + j] * a[i * n + j];
                }
            }
            s.sqrt()
        };
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                // Guard against overflow of theta^2; the limit t -> 1/(2 theta)
                // is exact to machine precision there.
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_p = c * akp - s * akq;
                    let new_q = s * akp + c * akq;
                    a[k * n + p] = new_p;
                    a[p * n + k] = new_p;
                    a[k * n + q] = new_q;
                    a[q * n + k] = new_q;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        // Final check: the last sweep may have finished the job.
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += 2.0 * a[i * n + j] * a[i * n + j];
            }
        }
        if off.sqrt() > threshold {
            return Err(Error::NoConvergence(tol::JACOBI_MAX_SWEEPS));
        }
    }

    // Sort the spectrum non-increasing, carrying eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].partial_cmp(&a[i * n + i]).expect("finite eigenvalues"));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, new_col)] = v[(row, old_col)];
        }
    }
    Ok(SymEigen { eigenvalues, eigenvectors: vectors })
}

/// Singular values of `M`, non-increasing, computed as square roots of the
/// Gram-matrix spectrum on whichever side of `M` is smaller.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    let gram = if m.rows() <= m.cols() { m.outer_gram() } else { m.gram() };
    let eig = sym_eigen(&gram)?;
    Ok(eig
        .eigenvalues
        .iter()
        .map(|&lam| if lam > 0.0 { lam.sqrt() } else { 0.0 })
        .collect())
}

/// Largest singular value; for symmetric `M` this equals the largest
/// absolute eigenvalue.
pub fn spectral_norm(m: &Matrix) -> Result<f64> {
    let sv = singular_values(m)?;
    Ok(sv[0])
}

/// Inverse square root of a symmetric positive-definite matrix.
///
/// Eigenvalues at or below [`tol::POS_DEF_MIN_EIG`] are an error rather
/// than being clamped: a singular input here means the noise model itself
/// is degenerate and must not be silently regularized.
pub fn inv_sqrt_sym(m: &Matrix) -> Result<Matrix> {
    let eig = sym_eigen(m)?;
    let min = eig.min();
    if min <= tol::POS_DEF_MIN_EIG {
        return Err(Error::NotPositiveDefinite(min));
    }
    // Assemble then re-symmetrize to scrub last-bit asymmetry.
    eig.assemble(|lam| 1.0 / lam.sqrt()).symmetrized()
}

#[allow(dead_code)]
pub(crate) fn column_vector(data: Vec<f64>) -> Vector {
    Vector::from_vec_unchecked(data)
}
