//! Certification: exhaustive RIP constants, coherence, and executable
//! checks of the two perturbation propositions.
//!
//! RIP constants are certified by enumerating every size-s column subset
//! in lexicographic order — no sampling, since the proposition checks need
//! true extremes. The rank range is split into fixed chunks scanned in
//! parallel; min/max reduction with ties broken toward the lower rank makes
//! the merged result identical to a single-threaded scan for any worker
//! count.

mod subsets;

pub use subsets::binomial;
use subsets::{next_combination, unrank};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, Matrix};
use crate::model::{draw_effective_noise, NoiseSpec};
use crate::rng::Seed;
use crate::tol;
use crate::whitening::{compute_eta, eta1, eta2, whiten};

const CHUNK: u64 = 8192;

/// Brute-force RIP certificate for one sparsity order.
#[derive(Debug, Clone, PartialEq)]
pub struct RipReport {
    pub s: usize,
    /// Smallest eigenvalue of any subset Gram `A_S^T A_S`.
    pub alpha: f64,
    /// Largest eigenvalue of any subset Gram.
    pub beta: f64,
    pub argmin_subset: Vec<usize>,
    pub argmax_subset: Vec<usize>,
    pub subsets_examined: u64,
}

impl RipReport {
    /// Flat `key=value` block (CLI output format).
    pub fn to_kv(&self) -> String {
        let fmt_set = |s: &[usize]| s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
        format!(
            "s={}\nalpha={:.16e}\nbeta={:.16e}\nargmin_subset={}\nargmax_subset={}\nsubsets_examined={}\n",
            self.s,
            self.alpha,
            self.beta,
            fmt_set(&self.argmin_subset),
            fmt_set(&self.argmax_subset),
            self.subsets_examined
        )
    }

    pub fn csv_header() -> &'static str {
        "s,alpha,beta,argmin_subset,argmax_subset,subsets_examined"
    }

    /// One CSV row matching [`RipReport::csv_header`]; subsets are
    /// space-separated inside their field.
    pub fn to_csv_row(&self) -> String {
        let fmt_set = |s: &[usize]| s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
        format!(
            "{},{:.16e},{:.16e},{},{},{}",
            self.s,
            self.alpha,
            self.beta,
            fmt_set(&self.argmin_subset),
            fmt_set(&self.argmax_subset),
            self.subsets_examined
        )
    }
}

/// Outcome of a proposition check on one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropositionVerdict {
    /// Whether the instance satisfies the proposition's eta hypothesis; when
    /// false, no bound was checked and `holds` is vacuously true.
    pub hypothesis_met: bool,
    pub bound_lhs: f64,
    pub bound_rhs: f64,
    pub holds: bool,
    /// `bound_rhs - bound_lhs` of the binding inequality.
    pub margin: f64,
}

impl PropositionVerdict {
    fn out_of_hypothesis() -> PropositionVerdict {
        PropositionVerdict { hypothesis_met: false, bound_lhs: 0.0, bound_rhs: 0.0, holds: true, margin: 0.0 }
    }

    pub fn to_kv(&self) -> String {
        format!(
            "hypothesis_met={}\nbound_lhs={:.16e}\nbound_rhs={:.16e}\nholds={}\nmargin={:.16e}\n",
            self.hypothesis_met, self.bound_lhs, self.bound_rhs, self.holds, self.margin
        )
    }

    pub fn csv_header() -> &'static str {
        "hypothesis_met,bound_lhs,bound_rhs,holds,margin"
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{},{:.16e}",
            self.hypothesis_met, self.bound_lhs, self.bound_rhs, self.holds, self.margin
        )
    }
}

fn slack_holds(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + tol::THEOREM_SLACK_REL * rhs.abs()
}

/// Extreme eigenvalues of the principal submatrix `gram[idx, idx]`.
/// Orders 1 and 2 are closed-form; larger orders go through Jacobi.
fn extreme_eigs(gram: &Matrix, idx: &[usize]) -> Result<(f64, f64)> {
    match *idx {
        [i] => {
            let g = gram[(i, i)];
            Ok((g, g))
        }
        [i, j] => {
            let a = gram[(i, i)];
            let c = gram[(j, j)];
            let b = gram[(i, j)];
            let mean = 0.5 * (a + c);
            let half = 0.5 * (a - c);
            let disc = (half * half + b * b).sqrt();
            Ok((mean - disc, mean + disc))
        }
        _ => {
            let s = idx.len();
            let mut sub = Matrix::zeros(s, s);
            for (r, &i) in idx.iter().enumerate() {
                for (c, &j) in idx.iter().enumerate() {
                    sub[(r, c)] = gram[(i, j)];
                }
            }
            let eig = sym_eigen(&sub)?;
            Ok((eig.min(), eig.max()))
        }
    }
}

fn checked_subset_count(p: usize, s: usize, n: usize, subset_cap: u64) -> Result<u64> {
    if s < 1 || s > n.min(p) {
        return Err(Error::InvalidParameter(format!(
            "sparsity order s = {s} must satisfy 1 <= s <= min(n, p) = {}",
            n.min(p)
        )));
    }
    let count = binomial(p as u64, s as u64);
    if count > subset_cap as u128 {
        return Err(Error::SubsetCapExceeded { p, s, count, cap: subset_cap });
    }
    Ok(count as u64)
}

#[derive(Clone, Copy)]
struct Extreme {
    value: f64,
    rank: u64,
}

/// Exhaustive RIP constants of order `s`.
pub fn rip_constants(a: &Matrix, s: usize, subset_cap: u64) -> Result<RipReport> {
    let (n, p) = (a.rows(), a.cols());
    let total = checked_subset_count(p, s, n, subset_cap)?;
    let gram = a.gram();

    struct Acc {
        min: Extreme,
        max: Extreme,
    }

    let n_chunks = total.div_ceil(CHUNK);
    let chunks: Vec<Result<Acc>> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let start = ci * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut subset = unrank(p, s, start);
            let mut acc = Acc {
                min: Extreme { value: f64::INFINITY, rank: start },
                max: Extreme { value: f64::NEG_INFINITY, rank: start },
            };
            for rank in start..end {
                let (lo, hi) = extreme_eigs(&gram, &subset)?;
                if lo < acc.min.value {
                    acc.min = Extreme { value: lo, rank };
                }
                if hi > acc.max.value {
                    acc.max = Extreme { value: hi, rank };
                }
                if rank + 1 < end {
                    next_combination(&mut subset, p);
                }
            }
            Ok(acc)
        })
        .collect();

    let mut min = Extreme { value: f64::INFINITY, rank: 0 };
    let mut max = Extreme { value: f64::NEG_INFINITY, rank: 0 };
    for chunk in chunks {
        let acc = chunk?;
        // Strict comparisons in ascending chunk order keep the earliest
        // lexicographic rank on ties.
        if acc.min.value < min.value {
            min = acc.min;
        }
        if acc.max.value > max.value {
            max = acc.max;
        }
    }

    Ok(RipReport {
        s,
        // Subset Grams are PSD; scrub the odd -1e-17 from round-off.
        alpha: min.value.max(0.0),
        beta: max.value,
        argmin_subset: unrank(p, s, min.rank),
        argmax_subset: unrank(p, s, max.rank),
        subsets_examined: total,
    })
}

/// Mutual coherence: the largest normalized absolute inner product over
/// distinct column pairs.
pub fn coherence(a: &Matrix) -> Result<f64> {
    let p = a.cols();
    if p < 2 {
        return Err(Error::InvalidParameter("coherence needs at least two columns".into()));
    }
    let norms: Vec<f64> = (0..p).map(|j| a.col_norm(j)).collect();
    if let Some(j) = norms.iter().position(|&x| x <= tol::ZERO_COLUMN_TOL) {
        return Err(Error::ZeroColumn(j));
    }
    // Work on the transpose so columns are contiguous rows.
    let at = a.transpose();
    let mut best: f64 = 0.0;
    for i in 0..p {
        let ri = at.row(i);
        for j in i + 1..p {
            let val = crate::linalg::dot(ri, at.row(j)).abs() / (norms[i] * norms[j]);
            if val > best {
                best = val;
            }
        }
    }
    // Round-off can push duplicate columns a few ulp past one.
    Ok(best.min(1.0))
}

/// RIP perturbation check (proposition 1): with `eta < 1/2`, the whitened
/// matrix must satisfy `alpha_s(B) >= (1 - eta1) alpha_s(A)` and
/// `beta_s(B) <= (1 + eta1) beta_s(A)`; the per-subset sandwich from the
/// proof is checked too while the enumeration is at it.
pub fn verify_prop1(a: &Matrix, noise: &NoiseSpec, s: usize, subset_cap: u64) -> Result<PropositionVerdict> {
    verify_prop1_with(a, noise, s, subset_cap, None)
}

/// As [`verify_prop1`], with explicit control over the per-subset sandwich
/// pass (`None` enables it up to [`tol::SANDWICH_AUTO_CAP`] subsets).
pub fn verify_prop1_with(
    a: &Matrix,
    noise: &NoiseSpec,
    s: usize,
    subset_cap: u64,
    sandwich: Option<bool>,
) -> Result<PropositionVerdict> {
    let eta = compute_eta(a)?;
    if eta >= 0.5 {
        return Ok(PropositionVerdict::out_of_hypothesis());
    }
    let (n, p) = (a.rows(), a.cols());
    let total = checked_subset_count(p, s, n, subset_cap)?;
    let sys = whiten(a, noise)?;
    let factor_lo = 1.0 - eta1(eta)?;
    let factor_hi = 1.0 + eta1(eta)?;
    let check_sandwich = sandwich.unwrap_or(total <= tol::SANDWICH_AUTO_CAP);

    let gram_a = a.gram();
    let gram_b = sys.b.gram();

    struct Acc {
        min_a: f64,
        max_a: f64,
        min_b: f64,
        max_b: f64,
        sandwich_failures: u64,
    }

    let n_chunks = total.div_ceil(CHUNK);
    let chunks: Vec<Result<Acc>> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let start = ci * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut subset = unrank(p, s, start);
            let mut acc = Acc {
                min_a: f64::INFINITY,
                max_a: f64::NEG_INFINITY,
                min_b: f64::INFINITY,
                max_b: f64::NEG_INFINITY,
                sandwich_failures: 0,
            };
            for rank in start..end {
                let (lo_a, hi_a) = extreme_eigs(&gram_a, &subset)?;
                let (lo_b, hi_b) = extreme_eigs(&gram_b, &subset)?;
                acc.min_a = acc.min_a.min(lo_a);
                acc.max_a = acc.max_a.max(hi_a);
                acc.min_b = acc.min_b.min(lo_b);
                acc.max_b = acc.max_b.max(hi_b);
                if check_sandwich
                    && !(slack_holds(factor_lo * lo_a, lo_b) && slack_holds(hi_b, factor_hi * hi_a))
                {
                    acc.sandwich_failures += 1;
                }
                if rank + 1 < end {
                    next_combination(&mut subset, p);
                }
            }
            Ok(acc)
        })
        .collect();

    let mut alpha_a = f64::INFINITY;
    let mut beta_a = f64::NEG_INFINITY;
    let mut alpha_b = f64::INFINITY;
    let mut beta_b = f64::NEG_INFINITY;
    let mut sandwich_failures = 0u64;
    for chunk in chunks {
        let acc = chunk?;
        alpha_a = alpha_a.min(acc.min_a);
        beta_a = beta_a.max(acc.max_a);
        alpha_b = alpha_b.min(acc.min_b);
        beta_b = beta_b.max(acc.max_b);
        sandwich_failures += acc.sandwich_failures;
    }

    // Lower side: (1 - eta1) alpha_A <= alpha_B. Upper side:
    // beta_B <= (1 + eta1) beta_A. Report the binding one.
    let lower = (factor_lo * alpha_a, alpha_b);
    let upper = (beta_b, factor_hi * beta_a);
    let holds = slack_holds(lower.0, lower.1) && slack_holds(upper.0, upper.1) && sandwich_failures == 0;
    let margin_lower = lower.1 - lower.0;
    let margin_upper = upper.1 - upper.0;
    let (bound_lhs, bound_rhs, margin) = if margin_lower <= margin_upper {
        (lower.0, lower.1, margin_lower)
    } else {
        (upper.0, upper.1, margin_upper)
    };
    Ok(PropositionVerdict { hypothesis_met: true, bound_lhs, bound_rhs, holds, margin })
}

/// Coherence perturbation check (proposition 2): with `eta < 3/4`,
/// `mu(B) <= (1 + eta2) mu(A)`.
pub fn verify_prop2(a: &Matrix, noise: &NoiseSpec) -> Result<PropositionVerdict> {
    let eta = compute_eta(a)?;
    if eta >= 0.75 {
        return Ok(PropositionVerdict::out_of_hypothesis());
    }
    let sys = whiten(a, noise)?;
    let mu_a = coherence(a)?;
    let mu_b = coherence(&sys.b)?;
    let bound_lhs = mu_b;
    let bound_rhs = (1.0 + eta2(eta)?) * mu_a;
    let holds = slack_holds(bound_lhs, bound_rhs);
    Ok(PropositionVerdict { hypothesis_met: true, bound_lhs, bound_rhs, holds, margin: bound_rhs - bound_lhs })
}

/// Sample covariance (mean removed, divisor N-1) of N effective-noise
/// draws `v = w + A z`, or of whitened draws `u = W v`.
pub fn estimate_noise_covariance(
    a: &Matrix,
    noise: &NoiseSpec,
    draws: usize,
    seed: Seed,
    whitened: bool,
) -> Result<Matrix> {
    if draws < 2 {
        return Err(Error::InvalidParameter("covariance estimation needs at least 2 draws".into()));
    }
    let transform = if whitened { Some(whiten(a, noise)?.w) } else { None };
    let n = a.rows();

    // Fixed-size chunks merged in order keep the result identical for any
    // worker count.
    const DRAW_CHUNK: usize = 1024;
    let n_chunks = draws.div_ceil(DRAW_CHUNK);
    let partials: Vec<Result<(Vec<f64>, Vec<f64>)>> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let start = ci * DRAW_CHUNK;
            let end = (start + DRAW_CHUNK).min(draws);
            let mut sum = vec![0.0; n];
            let mut outer = vec![0.0; n * n];
            for i in start..end {
                let mut v = draw_effective_noise(a, noise, seed.stream(i as u64))?;
                if let Some(w) = &transform {
                    v = w.matvec(&v)?;
                }
                let vs = v.as_slice();
                for (acc, &x) in sum.iter_mut().zip(vs) {
                    *acc += x;
                }
                for r in 0..n {
                    let vr = vs[r];
                    let row = &mut outer[r * n..(r + 1) * n];
                    for (o, &x) in row.iter_mut().zip(vs).skip(r) {
                        *o += vr * x;
                    }
                }
            }
            Ok((sum, outer))
        })
        .collect();

    let mut sum = vec![0.0; n];
    let mut outer = vec![0.0; n * n];
    for partial in partials {
        let (s, o) = partial?;
        for (acc, x) in sum.iter_mut().zip(s) {
            *acc += x;
        }
        for (acc, x) in outer.iter_mut().zip(o) {
            *acc += x;
        }
    }

    let count = draws as f64;
    let mean: Vec<f64> = sum.iter().map(|x| x / count).collect();
    let mut cov = vec![0.0; n * n];
    for r in 0..n {
        for c in r..n {
            let q = (outer[r * n + c] - count * mean[r] * mean[c]) / (count - 1.0);
            cov[r * n + c] = q;
            cov[c * n + r] = q;
        }
    }
    Ok(Matrix::from_vec_unchecked(n, n, cov))
}
