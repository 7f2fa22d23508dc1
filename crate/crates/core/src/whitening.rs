//! Whitening the effective noise and the quantities that control how much
//! it perturbs the measurement matrix.
//!
//! Multiplying `y = A x + v` by `W = Q1^{-1/2}` (with `Q1 = Q / gamma`)
//! gives `y' = B x + u` where `u` is exactly white with variance
//! `gamma = sigma^2 + (p/n) sigma0^2`. How far `B` drifts from `A` is
//! governed by `eta = norm(I - (n/p) A A^T)`; the closed forms `eta1`,
//! `eta2`, `eta3` translate eta into RIP and coherence perturbation
//! factors. They are evaluated directly from their formulas, never from
//! the truncated power series that motivate them.

use crate::error::{Error, Result};
use crate::linalg::{inv_sqrt_sym, sym_eigen, Matrix, Vector};
use crate::model::{effective_noise_covariance, NoiseSpec};

/// The noise-variance inflation `gamma` and the SNR degradation factor
/// `gamma / sigma^2` (undefined when `sigma = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldingFactor {
    pub gamma: f64,
    pub degradation: Option<f64>,
}

/// `gamma = sigma^2 + (p/n) sigma0^2`.
pub fn folding_gamma(sigma: f64, sigma0: f64, n: usize, p: usize) -> Result<FoldingFactor> {
    if n < 1 || p < 1 {
        return Err(Error::InvalidParameter("n and p must be positive".into()));
    }
    if !sigma.is_finite() || !sigma0.is_finite() || sigma < 0.0 || sigma0 < 0.0 {
        return Err(Error::InvalidParameter("noise levels must be finite and non-negative".into()));
    }
    if sigma == 0.0 && sigma0 == 0.0 {
        return Err(Error::NoNoise);
    }
    let ratio = p as f64 / n as f64;
    let gamma = sigma * sigma + ratio * (sigma0 * sigma0);
    let degradation = if sigma > 0.0 {
        let direct = gamma / (sigma * sigma);
        let expanded = 1.0 + ratio * (sigma0 * sigma0) / (sigma * sigma);
        debug_assert!((direct - expanded).abs() <= crate::tol::IDENTITY_REL * direct.max(1.0));
        Some(direct)
    } else {
        None
    };
    Ok(FoldingFactor { gamma, degradation })
}

/// `eta = norm(I - (n/p) A A^T)`, the spectral distance of the scaled
/// outer Gram from the identity.
pub fn compute_eta(a: &Matrix) -> Result<f64> {
    let (n, p) = (a.rows(), a.cols());
    let scaled = a.outer_gram().scaled(-(n as f64) / (p as f64)).plus_scaled_identity(1.0)?;
    let eig = sym_eigen(&scaled)?;
    Ok(eig.eigenvalues.iter().fold(0.0f64, |m, &lam| m.max(lam.abs())))
}

/// High-probability upper bound `2 sqrt(n/p) + n/p + 4 t / sqrt(p)` on eta
/// for i.i.d. N(0, 1/n) matrices; holds with probability at least
/// `1 - 2 exp(-t^2 / 2)` for `0 < t <= sqrt(n)` and `p >= n`.
pub fn eta_gaussian_bound(n: usize, p: usize, t: f64) -> Result<f64> {
    if p < n {
        return Err(Error::InvalidParameter(format!("bound requires p >= n, got n = {n}, p = {p}")));
    }
    if t.is_nan() || t <= 0.0 || t > (n as f64).sqrt() {
        return Err(Error::InvalidParameter(format!(
            "bound requires 0 < t <= sqrt(n) = {}, got t = {t}",
            (n as f64).sqrt()
        )));
    }
    let ratio = n as f64 / p as f64;
    Ok(2.0 * ratio.sqrt() + ratio + 4.0 * t / (p as f64).sqrt())
}

/// `eta1 = eta / (1 - eta)`: RIP perturbation factor. Requires `eta < 1`.
pub fn eta1(eta: f64) -> Result<f64> {
    check_unit_range(eta, 1.0, "eta1")?;
    Ok(eta / (1.0 - eta))
}

/// `eta2 = (2 sqrt(1 - eta) - 1)^{-2} - 1`: coherence perturbation factor.
/// Requires `eta < 3/4`.
///
/// The remark that `eta2 < 5 eta` whenever `eta < 1/2` fails near the top
/// of that range: `eta2(0.4) = 2.3155... > 2.0`, while `eta2(0.36) =
/// 1.7778 < 1.8`. The claim actually holds on roughly `(0, 0.36]`; this
/// function simply evaluates the definition and leaves the remark alone.
pub fn eta2(eta: f64) -> Result<f64> {
    check_unit_range(eta, 0.75, "eta2")?;
    let root = 2.0 * (1.0 - eta).sqrt() - 1.0;
    Ok(1.0 / (root * root) - 1.0)
}

/// `eta3 = (1 - eta)^{-1/2} - 1`: column-norm shrinkage bound. Requires
/// `eta < 1`.
pub fn eta3(eta: f64) -> Result<f64> {
    check_unit_range(eta, 1.0, "eta3")?;
    Ok(1.0 / (1.0 - eta).sqrt() - 1.0)
}

fn check_unit_range(eta: f64, upper: f64, what: &str) -> Result<()> {
    if !eta.is_finite() || eta < 0.0 || eta >= upper {
        return Err(Error::InvalidParameter(format!("{what} requires 0 <= eta < {upper}, got {eta}")));
    }
    Ok(())
}

/// The equivalent white-noise system `y' = B x + u`.
#[derive(Debug, Clone)]
pub struct WhitenedSystem {
    /// Whitened measurement matrix `B = W A`.
    pub b: Matrix,
    /// Whitening transform `W = Q1^{-1/2}`.
    pub w: Matrix,
    /// Noise variance of `u`.
    pub gamma: f64,
    /// `eta` of the original matrix `A`.
    pub eta: f64,
}

/// Build the whitened system for `A` under the given noise levels.
///
/// Fails with [`Error::NotPositiveDefinite`] when `Q` is singular, which
/// happens only for `sigma = 0` with rank-deficient `A A^T`.
pub fn whiten(a: &Matrix, noise: &NoiseSpec) -> Result<WhitenedSystem> {
    let (n, p) = (a.rows(), a.cols());
    let folding = folding_gamma(noise.sigma, noise.sigma0, n, p)?;
    let q = effective_noise_covariance(a, noise);
    let q1 = q.scaled(1.0 / folding.gamma);
    let w = inv_sqrt_sym(&q1)?;
    let b = w.matmul(a)?;
    let eta = compute_eta(a)?;
    Ok(WhitenedSystem { b, w, gamma: folding.gamma, eta })
}

/// Apply the whitening transform to an observation.
pub fn apply_whitening(sys: &WhitenedSystem, y: &Vector) -> Result<Vector> {
    sys.w.matvec(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{gen_concat_orthobases, gen_gaussian};
    use crate::rng::Seed;
    use crate::tol;

    #[test]
    fn gamma_values() {
        let f = folding_gamma(1.0, 1.0, 64, 256).unwrap();
        assert_eq!(f.gamma, 5.0);
        assert_eq!(f.degradation, Some(5.0));

        let f = folding_gamma(2.0, 0.0, 10, 1000).unwrap();
        assert_eq!(f.gamma, 4.0);
        assert_eq!(f.degradation, Some(1.0));

        let f = folding_gamma(0.1, 0.5, 100, 1000).unwrap();
        assert!((f.gamma - 2.51).abs() < 1e-14);

        assert!(matches!(folding_gamma(0.0, 0.0, 4, 8), Err(Error::NoNoise)));
        let f = folding_gamma(0.0, 1.0, 4, 8).unwrap();
        assert_eq!(f.degradation, None);
    }

    #[test]
    fn degradation_routes_agree() {
        for &(sigma, sigma0, n, p) in
            &[(0.05, 0.05, 64usize, 1024usize), (1.0, 3.0, 16, 256), (0.3, 0.01, 7, 91)]
        {
            let f = folding_gamma(sigma, sigma0, n, p).unwrap();
            let direct = f.degradation.unwrap();
            let expanded = 1.0 + (p as f64 / n as f64) * (sigma0 * sigma0) / (sigma * sigma);
            assert!((direct - expanded).abs() <= tol::IDENTITY_REL * direct);
        }
    }

    #[test]
    fn eta_of_orthobases_vanishes() {
        let a = gen_concat_orthobases(4, 2, Seed(7)).unwrap();
        assert!(compute_eta(&a).unwrap() <= tol::ORTHOBASIS_GRAM_TOL);
    }

    // A = [1 0] gives A A^T = 1, so eta = |1 - (1/2)| = 1/2.
    #[test]
    fn eta_by_hand() {
        let a = Matrix::from_rows(&[&[1.0, 0.0]]).unwrap();
        assert!((compute_eta(&a).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn eta_respects_gaussian_bound() {
        let a = gen_gaussian(64, 4096, Seed(2)).unwrap();
        let eta = compute_eta(&a).unwrap();
        let bound = eta_gaussian_bound(64, 4096, 3.0).unwrap();
        assert!(eta <= bound, "eta {eta} above bound {bound}");
    }

    #[test]
    fn bound_arithmetic() {
        assert!((eta_gaussian_bound(64, 256, 2.0).unwrap() - 1.75).abs() < 1e-14);
        assert!((eta_gaussian_bound(100, 10_000, 1.0).unwrap() - 0.25).abs() < 1e-14);
        assert!((eta_gaussian_bound(4, 4, 2.0).unwrap() - 7.0).abs() < 1e-14);
        assert!(eta_gaussian_bound(4, 2, 1.0).is_err());
        assert!(eta_gaussian_bound(4, 8, 0.0).is_err());
        assert!(eta_gaussian_bound(4, 8, 2.1).is_err());
    }

    #[test]
    fn eta_functions_at_zero_and_known_points() {
        assert_eq!(eta1(0.0).unwrap(), 0.0);
        assert_eq!(eta2(0.0).unwrap(), 0.0);
        assert_eq!(eta3(0.0).unwrap(), 0.0);

        assert!((eta1(0.5).unwrap() - 1.0).abs() < 1e-15);
        // (2 sqrt(0.5) - 1)^{-2} - 1
        assert!((eta2(0.5).unwrap() - 4.828_427_124_746_19).abs() < 1e-7);
        // 1 - eta = 0.64 -> (0.6)^{-2} - 1 = 25/9 - 1 = 16/9
        assert!((eta2(0.36).unwrap() - 16.0 / 9.0).abs() < 1e-12);

        assert!(eta1(1.0).is_err());
        assert!(eta3(1.0).is_err());
        assert!(eta2(0.75).is_err());
        assert!(eta2(-0.1).is_err());
    }

    // (1 + eta1) / (1 - eta3)^2 = 1 + eta2, the identity the coherence
    // proof rests on.
    #[test]
    fn proof_identity_on_grid() {
        for k in 1..=74 {
            let eta = k as f64 / 100.0;
            let lhs = (1.0 + eta1(eta).unwrap()) / (1.0 - eta3(eta).unwrap()).powi(2);
            let rhs = 1.0 + eta2(eta).unwrap();
            assert!((lhs - rhs).abs() <= tol::IDENTITY_REL * rhs, "eta = {eta}");
        }
    }

    #[test]
    fn eta2_small_eta_expansion() {
        for k in 1..=20 {
            let eta = k as f64 / 100.0;
            let e2 = eta2(eta).unwrap();
            assert!((e2 - 2.0 * eta).abs() <= 6.0 * eta * eta, "eta = {eta}, eta2 = {e2}");
        }
    }

    #[test]
    fn whiten_with_zero_sigma0_is_identity() {
        let a = gen_gaussian(6, 24, Seed(3)).unwrap();
        let sys = whiten(&a, &NoiseSpec::new(0.8, 0.0).unwrap()).unwrap();
        assert!(sys.w.sub(&Matrix::identity(6)).unwrap().max_abs() < 1e-12);
        assert!(sys.b.sub(&a).unwrap().max_abs() < 1e-10);
        assert_eq!(sys.gamma, 0.8 * 0.8);
    }

    #[test]
    fn whiten_orthobases_leaves_matrix_unchanged() {
        let a = gen_concat_orthobases(8, 4, Seed(11)).unwrap();
        let sys = whiten(&a, &NoiseSpec::new(1.0, 1.0).unwrap()).unwrap();
        let q1 = effective_noise_covariance(&a, &NoiseSpec::new(1.0, 1.0).unwrap()).scaled(1.0 / sys.gamma);
        assert!(q1.sub(&Matrix::identity(8)).unwrap().max_abs() <= tol::ORTHOBASIS_GRAM_TOL);
        assert!(sys.b.sub(&a).unwrap().max_abs() <= tol::ORTHOBASIS_WHITEN_MAX);
        assert_eq!(sys.gamma, 5.0);
    }

    #[test]
    fn whitened_system_invariants() {
        let a = gen_gaussian(12, 96, Seed(19)).unwrap();
        let noise = NoiseSpec::new(0.5, 1.0).unwrap();
        let sys = whiten(&a, &noise).unwrap();
        // W Q1 W = I
        let q1 = effective_noise_covariance(&a, &noise).scaled(1.0 / sys.gamma);
        let wqw = sys.w.matmul(&q1).unwrap().matmul(&sys.w).unwrap();
        assert!(wqw.sub(&Matrix::identity(12)).unwrap().max_abs() <= tol::INV_SQRT_RESIDUAL_MAX);
        // B = W A by construction
        let b = sys.w.matmul(&a).unwrap();
        assert_eq!(b.as_slice(), sys.b.as_slice());
        // W symmetric positive definite
        assert_eq!(sys.w.max_asymmetry().unwrap(), 0.0);
        assert!(sym_eigen(&sys.w).unwrap().min() > 0.0);
    }

    #[test]
    fn whiten_rejects_singular_covariance() {
        // sigma = 0 and A A^T rank-deficient.
        let a = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
        let err = whiten(&a, &NoiseSpec::new(0.0, 1.0).unwrap());
        assert!(matches!(err, Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn apply_whitening_identity_and_linearity() {
        let a = gen_gaussian(5, 40, Seed(23)).unwrap();
        let sys = whiten(&a, &NoiseSpec::new(1.0, 0.0).unwrap()).unwrap();
        let y = Vector::from_vec(vec![1.0, -2.0, 3.0, 0.5, 0.0]).unwrap();
        let wy = apply_whitening(&sys, &y).unwrap();
        for i in 0..5 {
            assert!((wy[i] - y[i]).abs() < 1e-12);
        }

        let sys = whiten(&a, &NoiseSpec::new(0.5, 1.0).unwrap()).unwrap();
        let y1 = Vector::from_vec(vec![0.3, 1.0, -0.7, 2.0, 0.9]).unwrap();
        let y2 = Vector::from_vec(vec![-1.1, 0.2, 0.4, -0.6, 1.5]).unwrap();
        let lhs = apply_whitening(&sys, &y1.add(&y2).unwrap()).unwrap();
        let rhs = apply_whitening(&sys, &y1).unwrap().add(&apply_whitening(&sys, &y2).unwrap()).unwrap();
        let dev = lhs.sub(&rhs).unwrap().norm();
        assert!(dev <= tol::IDENTITY_REL * lhs.norm().max(1.0));
    }

    // Norm bounds from the proposition proofs, on a random instance:
    // |Q1 - I| <= eta, |Q1^{-1} - I| <= eta1, |Q1^{-1/2} - I| <= eta3.
    #[test]
    fn proof_quantity_bounds_hold() {
        let a = gen_gaussian(16, 512, Seed(29)).unwrap();
        let noise = NoiseSpec::new(1.0, 1.0).unwrap();
        let eta = compute_eta(&a).unwrap();
        assert!(eta < 1.0, "instance eta {eta} out of range for this test");
        let folding = folding_gamma(noise.sigma, noise.sigma0, 16, 512).unwrap();
        let q1 = effective_noise_covariance(&a, &noise).scaled(1.0 / folding.gamma);
        let eig = sym_eigen(&q1).unwrap();
        let slack = tol::THEOREM_SLACK_REL;

        let dev_q1 = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max((l - 1.0).abs()));
        assert!(dev_q1 <= eta * (1.0 + slack), "|Q1 - I| = {dev_q1} > eta = {eta}");

        let dev_inv = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max((1.0 / l - 1.0).abs()));
        let e1 = eta1(eta).unwrap();
        assert!(dev_inv <= e1 * (1.0 + slack) + slack, "|Q1^-1 - I| = {dev_inv} > eta1 = {e1}");

        let dev_half = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max((1.0 / l.sqrt() - 1.0).abs()));
        let e3 = eta3(eta).unwrap();
        assert!(dev_half <= e3 * (1.0 + slack) + slack, "|Q1^-1/2 - I| = {dev_half} > eta3 = {e3}");
    }
}
