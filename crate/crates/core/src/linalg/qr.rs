//! Householder QR and the least-squares solve built on it.

use super::{dot, Matrix, Vector};
use crate::error::{Error, Result};
use crate::tol;

/// QR factorization of an n x k matrix, n >= k, as a product of
/// Householder reflections.
#[derive(Debug, Clone)]
pub struct Qr {
    n: usize,
    k: usize,
    /// Householder vectors; `vs[j]` acts on rows `j..n`.
    vs: Vec<Vec<f64>>,
    betas: Vec<f64>,
    r: Matrix,
}

impl Qr {
    pub fn factor(m: &Matrix) -> Result<Qr> {
        let (n, k) = (m.rows(), m.cols());
        if n < k {
            return Err(Error::RankDeficient);
        }
        let mut work: Vec<f64> = m.as_slice().to_vec();
        let mut vs = Vec::with_capacity(k);
        let mut betas = Vec::with_capacity(k);

        for j in 0..k {
            let mut v: Vec<f64> = (j..n).map(|i| work[i * k + j]).collect();
            let norm = dot(&v, &v).sqrt();
            let beta;
            if norm == 0.0 {
                beta = 0.0; // column already zero below the diagonal
            } else {
                let alpha = if v[0] >= 0.0 { -norm } else { norm };
                v[0] -= alpha;
                let vtv = dot(&v, &v);
                beta = if vtv == 0.0 { 0.0 } else { 2.0 / vtv };
                // Apply H = I - beta v v^T to the trailing block.
                for col in j..k {
                    let mut s = 0.0;
                    for (i, vi) in v.iter().enumerate() {
                        s += vi * work[(j + i) * k + col];
                    }
                    s *= beta;
                    for (i, vi) in v.iter().enumerate() {
                        work[(j + i) * k + col] -= s * vi;
                    }
                }
                work[j * k + j] = alpha;
                for i in j + 1..n {
                    work[i * k + j] = 0.0;
                }
            }
            vs.push(v);
            betas.push(beta);
        }

        let mut r = Matrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                r[(i, j)] = work[i * k + j];
            }
        }
        Ok(Qr { n, k, vs, betas, r })
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    /// Smallest over largest `|R_ii|`; the rank test used by the solver.
    fn diag_ratio(&self) -> f64 {
        let mut min = f64::INFINITY;
        let mut max: f64 = 0.0;
        for i in 0..self.k {
            let d = self.r[(i, i)].abs();
            min = min.min(d);
            max = max.max(d);
        }
        if max == 0.0 {
            0.0
        } else {
            min / max
        }
    }

    pub fn is_full_rank(&self) -> bool {
        self.diag_ratio() > tol::RANK_REL_TOL
    }

    /// `Q^T b` (full length n).
    pub fn apply_qt(&self, b: &[f64]) -> Vec<f64> {
        let mut out = b.to_vec();
        for j in 0..self.k {
            let beta = self.betas[j];
            if beta == 0.0 {
                continue;
            }
            let v = &self.vs[j];
            let mut s = 0.0;
            for (i, vi) in v.iter().enumerate() {
                s += vi * out[j + i];
            }
            s *= beta;
            for (i, vi) in v.iter().enumerate() {
                out[j + i] -= s * vi;
            }
        }
        out
    }

    /// Solve `R x = c` by back substitution; `c` is the leading k entries.
    pub fn solve_upper(&self, c: &[f64]) -> Result<Vec<f64>> {
        if !self.is_full_rank() {
            return Err(Error::RankDeficient);
        }
        let k = self.k;
        let mut x = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = c[i];
            for (j, &xj) in x.iter().enumerate().take(k).skip(i + 1) {
                s -= self.r[(i, j)] * xj;
            }
            x[i] = s / self.r[(i, i)];
        }
        Ok(x)
    }

    /// Explicit n x n orthogonal factor.
    pub fn q_full(&self) -> Matrix {
        let n = self.n;
        let mut q: Vec<f64> = Matrix::identity(n).as_slice().to_vec();
        // Q = H_0 H_1 ... H_{k-1}; apply them to I from the right-most out.
        for j in (0..self.k).rev() {
            let beta = self.betas[j];
            if beta == 0.0 {
                continue;
            }
            let v = &self.vs[j];
            for col in 0..n {
                let mut s = 0.0;
                for (i, vi) in v.iter().enumerate() {
                    s += vi * q[(j + i) * n + col];
                }
                s *= beta;
                for (i, vi) in v.iter().enumerate() {
                    q[(j + i) * n + col] -= s * vi;
                }
            }
        }
        Matrix::from_vec_unchecked(n, n, q)
    }
}

/// Minimizer of `norm(M c - b)` for full-column-rank `M`.
pub fn least_squares(m: &Matrix, b: &Vector) -> Result<Vector> {
    if m.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} with rhs of length {}",
            m.rows(),
            m.cols(),
            b.len()
        )));
    }
    let qr = Qr::factor(m)?;
    let qtb = qr.apply_qt(b.as_slice());
    let x = qr.solve_upper(&qtb[..m.cols()])?;
    Ok(Vector::from_vec_unchecked(x))
}

/// Orthogonal factor of a square matrix, with the sign convention that the
/// diagonal of `R` is non-negative, making the factor unique for a given
/// input.
pub fn orthonormalize_square(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let qr = Qr::factor(m)?;
    if !qr.is_full_rank() {
        return Err(Error::RankDeficient);
    }
    let mut q = qr.q_full();
    let n = m.rows();
    for j in 0..n {
        if qr.r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Ok(q)
}
