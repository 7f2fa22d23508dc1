//! Greedy sparse recovery: orthogonal matching pursuit and one-shot
//! thresholding.
//!
//! Both select columns by the norm-normalized correlation
//! `|M_j^T r| / norm(M_j)` — whitening rescales column norms, and an
//! unnormalized score would bias selection after the transform. Both stop
//! at the sparsity budget; there is no residual-threshold-only mode.

use crate::error::{Error, Result};
use crate::linalg::{least_squares, Matrix, Vector};
use crate::model::SparseSignal;
use crate::tol;

/// Output of a recovery run: the dense estimate, its support, and the
/// final residual.
#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub xhat: Vector,
    pub support: Vec<usize>,
    pub residual_norm: f64,
    pub iterations: usize,
}

fn column_norms_checked(m: &Matrix) -> Result<Vec<f64>> {
    let norms: Vec<f64> = (0..m.cols()).map(|j| m.col_norm(j)).collect();
    if let Some(j) = norms.iter().position(|&x| x <= tol::ZERO_COLUMN_TOL) {
        return Err(Error::ZeroColumn(j));
    }
    Ok(norms)
}

fn check_budget(m: &Matrix, y: &Vector, s: usize) -> Result<()> {
    if y.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "observation of length {} against {} rows",
            y.len(),
            m.rows()
        )));
    }
    if s < 1 || s > m.rows().min(m.cols()) {
        return Err(Error::InvalidParameter(format!(
            "sparsity budget s = {s} must satisfy 1 <= s <= min(n, p) = {}",
            m.rows().min(m.cols())
        )));
    }
    Ok(())
}

/// Assemble the dense estimate and residual for a support/coefficient fit.
fn finish(
    m: &Matrix,
    y: &Vector,
    mut picked: Vec<usize>,
    coeffs: Vec<f64>,
    iterations: usize,
) -> RecoveryResult {
    let mut xhat = Vector::zeros(m.cols());
    for (&j, &c) in picked.iter().zip(&coeffs) {
        xhat[j] = c;
    }
    let residual_norm = match m.matvec(&xhat) {
        Ok(fit) => y.sub(&fit).map(|r| r.norm()).unwrap_or(f64::NAN),
        Err(_) => f64::NAN,
    };
    picked.sort_unstable();
    RecoveryResult { xhat, support: picked, residual_norm, iterations }
}

/// Orthogonal matching pursuit with budget `s`.
///
/// Per iteration: pick the unselected column with the largest normalized
/// correlation against the residual (ties to the lowest index), then refit
/// by least squares on the accumulated support. Stops early once the
/// residual drops below [`tol::PURSUIT_RESIDUAL_REL`] times `norm(y)`; a
/// rank-deficient refit aborts with the support selected so far.
pub fn omp(m: &Matrix, y: &Vector, s: usize) -> Result<RecoveryResult> {
    check_budget(m, y, s)?;
    let norms = column_norms_checked(m)?;
    let y_norm = y.norm();
    let stop = tol::PURSUIT_RESIDUAL_REL * y_norm;

    let mut picked: Vec<usize> = Vec::with_capacity(s);
    let mut selected = vec![false; m.cols()];
    let mut coeffs: Vec<f64> = Vec::new();
    let mut residual = y.clone();
    let mut iterations = 0;

    for _ in 0..s {
        if residual.norm() <= stop {
            break;
        }
        let mut best_j = None;
        let mut best_score = f64::NEG_INFINITY;
        for j in 0..m.cols() {
            if selected[j] {
                continue;
            }
            let score = m.col_dot(j, residual.as_slice()).abs() / norms[j];
            if score > best_score {
                best_score = score;
                best_j = Some(j);
            }
        }
        let j = best_j.expect("budget below column count leaves candidates");
        picked.push(j);
        selected[j] = true;

        let submatrix = m.select_columns(&picked)?;
        match least_squares(&submatrix, y) {
            Ok(c) => {
                residual = y.sub(&submatrix.matvec(&c)?)?;
                coeffs = c.into();
                iterations += 1;
            }
            Err(Error::RankDeficient) => {
                // Abort with the fit from the previous iteration.
                picked.pop();
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(finish(m, y, picked, coeffs, iterations))
}

/// One-shot thresholding: select the `s` columns with the largest
/// normalized correlation against `y` (ties to the lowest index), then fit
/// once by least squares. If the selected submatrix is rank-deficient, the
/// lowest-scoring columns are dropped until the fit succeeds.
pub fn threshold_recover(m: &Matrix, y: &Vector, s: usize) -> Result<RecoveryResult> {
    check_budget(m, y, s)?;
    let norms = column_norms_checked(m)?;

    let scores: Vec<f64> =
        (0..m.cols()).map(|j| m.col_dot(j, y.as_slice()).abs() / norms[j]).collect();
    let mut order: Vec<usize> = (0..m.cols()).collect();
    order.sort_by(|&i, &j| {
        scores[j].partial_cmp(&scores[i]).expect("finite scores").then(i.cmp(&j))
    });
    // Fit in score order: the submatrix a column permutation sees is then
    // identical, making recovery exactly permutation invariant.
    let mut picked: Vec<usize> = order[..s].to_vec();

    loop {
        if picked.is_empty() {
            return Ok(finish(m, y, picked, Vec::new(), 1));
        }
        let submatrix = m.select_columns(&picked)?;
        match least_squares(&submatrix, y) {
            Ok(c) => return Ok(finish(m, y, picked, c.into(), 1)),
            Err(Error::RankDeficient) => {
                // Drop the weakest column and retry with a smaller support.
                let weakest = picked
                    .iter()
                    .enumerate()
                    .min_by(|(_, &a), (_, &b)| {
                        scores[a].partial_cmp(&scores[b]).expect("finite scores").then(b.cmp(&a))
                    })
                    .map(|(pos, _)| pos)
                    .expect("non-empty support");
                picked.remove(weakest);
            }
            Err(e) => return Err(e),
        }
    }
}

/// `norm(xhat - x)^2` against the true sparse signal.
pub fn squared_error(xhat: &Vector, x: &SparseSignal) -> Result<f64> {
    if xhat.len() != x.p {
        return Err(Error::DimensionMismatch(format!(
            "estimate of length {} against signal dimension {}",
            xhat.len(),
            x.p
        )));
    }
    let diff = xhat.sub(&x.to_dense())?;
    Ok(diff.dot(&diff))
}
