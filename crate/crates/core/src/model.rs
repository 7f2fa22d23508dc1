//! Sparse signals and the forward measurement models.
//!
//! Three algebraically linked forms of the same observation:
//!
//! - the standard model `y = A x + w` with measurement noise only,
//! - the pre-measurement noise model `y = A (x + z) + w`,
//! - its equivalent form `y = A x + v` with effective noise `v = w + A z`.
//!
//! Draws store `v` computed literally as `w + A z` and `y` as `A x + v`,
//! so the second and third forms agree bit-for-bit while the first holds
//! to rounding. The measurement and signal noise come from disjoint
//! sub-streams of the draw seed, which makes the standard and pre-noise
//! models paired: toggling `sigma0` never perturbs the `w` sample.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::rng::{Seed, SplitMix64};

/// Sub-stream carrying the measurement noise `w`.
const STREAM_MEASUREMENT_NOISE: u64 = 0;
/// Sub-stream carrying the signal noise `z`.
const STREAM_SIGNAL_NOISE: u64 = 1;
/// Sub-stream carrying the support shuffle and signs of a sparse signal.
const STREAM_SIGNAL: u64 = 2;

/// Noise levels of the two models: `sigma` for the measurement noise `w`,
/// `sigma0` for the signal noise `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub sigma0: f64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, sigma0: f64) -> Result<NoiseSpec> {
        if !sigma.is_finite() || !sigma0.is_finite() || sigma < 0.0 || sigma0 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "noise standard deviations must be finite and non-negative, got sigma = {sigma}, sigma0 = {sigma0}"
            )));
        }
        Ok(NoiseSpec { sigma, sigma0 })
    }
}

/// An s-sparse signal: a sorted support and the amplitudes on it.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    pub p: usize,
    pub support: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseSignal {
    pub fn new(p: usize, support: Vec<usize>, values: Vec<f64>) -> Result<SparseSignal> {
        if support.len() != values.len() {
            return Err(Error::DimensionMismatch("support and values lengths differ".into()));
        }
        if support.len() > p {
            return Err(Error::InvalidParameter("support larger than ambient dimension".into()));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("support must be strictly increasing".into()));
        }
        if support.last().is_some_and(|&i| i >= p) {
            return Err(Error::InvalidParameter("support index out of range".into()));
        }
        if values.iter().any(|&v| v == 0.0 || !v.is_finite()) {
            return Err(Error::InvalidParameter("amplitudes must be nonzero and finite".into()));
        }
        Ok(SparseSignal { p, support, values })
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn to_dense(&self) -> Vector {
        let mut x = Vector::zeros(self.p);
        for (&i, &v) in self.support.iter().zip(&self.values) {
            x[i] = v;
        }
        x
    }
}

/// One realization of a measurement: the observation `y` plus the noise
/// components it was built from.
#[derive(Debug, Clone)]
pub struct MeasurementDraw {
    pub y: Vector,
    pub z: Vector,
    pub w: Vector,
    pub v: Vector,
}

/// Random s-sparse signal: support uniform without replacement, values
/// `+/- amplitude` with equiprobable signs.
pub fn gen_sparse_signal(p: usize, s: usize, amplitude: f64, seed: Seed) -> Result<SparseSignal> {
    if s < 1 || s > p {
        return Err(Error::InvalidParameter(format!("sparsity s = {s} must satisfy 1 <= s <= p = {p}")));
    }
    if amplitude <= 0.0 || !amplitude.is_finite() {
        return Err(Error::InvalidParameter(format!("amplitude must be positive, got {amplitude}")));
    }
    let mut rng = SplitMix64::new(seed.stream(STREAM_SIGNAL));
    // Partial Fisher-Yates: the first s slots end up a uniform sample.
    let mut pool: Vec<usize> = (0..p).collect();
    for i in 0..s {
        let j = i + rng.next_below((p - i) as u64) as usize;
        pool.swap(i, j);
    }
    let mut support: Vec<usize> = pool[..s].to_vec();
    support.sort_unstable();
    let values: Vec<f64> = (0..s).map(|_| amplitude * rng.next_sign()).collect();
    SparseSignal::new(p, support, values)
}

fn draw_w(n: usize, sigma: f64, seed: Seed) -> Vector {
    let mut rng = SplitMix64::new(seed.stream(STREAM_MEASUREMENT_NOISE));
    Vector::from_vec_unchecked(rng.normals(n).into_iter().map(|g| sigma * g).collect())
}

fn draw_z(p: usize, sigma0: f64, seed: Seed) -> Vector {
    let mut rng = SplitMix64::new(seed.stream(STREAM_SIGNAL_NOISE));
    Vector::from_vec_unchecked(rng.normals(p).into_iter().map(|g| sigma0 * g).collect())
}

fn check_shape(a: &Matrix, x: &SparseSignal) -> Result<()> {
    if a.cols() != x.p {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} columns but signal lives in dimension {}",
            a.cols(),
            x.p
        )));
    }
    Ok(())
}

/// Standard model: `y = A x + w`, no signal noise.
pub fn measure_standard(a: &Matrix, x: &SparseSignal, noise: &NoiseSpec, seed: Seed) -> Result<MeasurementDraw> {
    check_shape(a, x)?;
    let w = draw_w(a.rows(), noise.sigma, seed);
    let v = w.clone();
    let y = a.matvec(&x.to_dense())?.add(&v)?;
    Ok(MeasurementDraw { y, z: Vector::zeros(a.cols()), w, v })
}

/// Pre-measurement noise model: `y = A (x + z) + w`, stored in the
/// equivalent form `y = A x + v` with `v = w + A z`.
pub fn measure_prenoise(a: &Matrix, x: &SparseSignal, noise: &NoiseSpec, seed: Seed) -> Result<MeasurementDraw> {
    check_shape(a, x)?;
    let w = draw_w(a.rows(), noise.sigma, seed);
    let (z, v) = if noise.sigma0 == 0.0 {
        // Degenerate case is the standard model, bit for bit.
        (Vector::zeros(a.cols()), w.clone())
    } else {
        let z = draw_z(a.cols(), noise.sigma0, seed);
        let v = w.add(&a.matvec(&z)?)?;
        (z, v)
    };
    let y = a.matvec(&x.to_dense())?.add(&v)?;
    Ok(MeasurementDraw { y, z, w, v })
}

/// Effective noise covariance `Q = sigma^2 I + sigma0^2 A A^T`.
pub fn effective_noise_covariance(a: &Matrix, noise: &NoiseSpec) -> Matrix {
    a.outer_gram()
        .scaled(noise.sigma0 * noise.sigma0)
        .plus_scaled_identity(noise.sigma * noise.sigma)
        .expect("outer Gram is square")
}

/// One draw of the effective noise `v = w + A z` (used by the covariance
/// estimator; shares the stream discipline of the measurement models).
pub(crate) fn draw_effective_noise(a: &Matrix, noise: &NoiseSpec, seed: Seed) -> Result<Vector> {
    let w = draw_w(a.rows(), noise.sigma, seed);
    if noise.sigma0 == 0.0 {
        return Ok(w);
    }
    let z = draw_z(a.cols(), noise.sigma0, seed);
    w.add(&a.matvec(&z)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::gen_gaussian;

    #[test]
    fn sparse_signal_full_support() {
        let x = gen_sparse_signal(8, 8, 1.0, Seed(4)).unwrap();
        assert_eq!(x.support, (0..8).collect::<Vec<_>>());
        assert!(x.values.iter().all(|&v| v == 1.0 || v == -1.0));
    }

    #[test]
    fn sparse_signal_rejects_bad_params() {
        assert!(gen_sparse_signal(8, 0, 1.0, Seed(1)).is_err());
        assert!(gen_sparse_signal(8, 9, 1.0, Seed(1)).is_err());
        assert!(gen_sparse_signal(8, 2, 0.0, Seed(1)).is_err());
    }

    #[test]
    fn sparse_signal_deterministic() {
        let a = gen_sparse_signal(1000, 10, 1.0, Seed(5)).unwrap();
        let b = gen_sparse_signal(1000, 10, 1.0, Seed(5)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.sparsity(), 10);
        // Support is a set in range.
        assert!(a.support.windows(2).all(|w| w[0] < w[1]));
        assert!(*a.support.last().unwrap() < 1000);
    }

    #[test]
    fn noiseless_standard_measurement_is_exact() {
        let a = gen_gaussian(6, 12, Seed(8)).unwrap();
        let x = gen_sparse_signal(12, 3, 1.0, Seed(2)).unwrap();
        let noise = NoiseSpec::new(0.0, 0.0).unwrap();
        let draw = measure_standard(&a, &x, &noise, Seed(3)).unwrap();
        let ax = a.matvec(&x.to_dense()).unwrap();
        assert_eq!(draw.y.as_slice(), ax.as_slice());
        assert!(draw.w.as_slice().iter().all(|&t| t == 0.0));
    }

    #[test]
    fn identity_matrix_reproduces_signal() {
        let a = Matrix::identity(4);
        let x = SparseSignal::new(4, vec![0], vec![1.0]).unwrap();
        let noise = NoiseSpec::new(0.0, 0.0).unwrap();
        let draw = measure_standard(&a, &x, &noise, Seed(1)).unwrap();
        assert_eq!(draw.y.as_slice(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn measurement_noise_variance() {
        // Scalar model, many draws: sample variance of w within 5% of 1.
        let a = Matrix::identity(1);
        let x = SparseSignal::new(1, vec![0], vec![1.0]).unwrap();
        let noise = NoiseSpec::new(1.0, 0.0).unwrap();
        let n_draws = 10_000;
        let ws: Vec<f64> = (0..n_draws)
            .map(|i| measure_standard(&a, &x, &noise, Seed(100).stream(i)).unwrap().w[0])
            .collect();
        let mean = ws.iter().sum::<f64>() / n_draws as f64;
        let var = ws.iter().map(|w| (w - mean) * (w - mean)).sum::<f64>() / (n_draws - 1) as f64;
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn prenoise_with_zero_sigma0_matches_standard_bitwise() {
        let a = gen_gaussian(10, 40, Seed(6)).unwrap();
        let x = gen_sparse_signal(40, 4, 1.0, Seed(7)).unwrap();
        let noise = NoiseSpec::new(0.7, 0.0).unwrap();
        let std = measure_standard(&a, &x, &noise, Seed(11)).unwrap();
        let pre = measure_prenoise(&a, &x, &noise, Seed(11)).unwrap();
        assert_eq!(std.y.as_slice(), pre.y.as_slice());
        assert_eq!(std.w.as_slice(), pre.w.as_slice());
    }

    #[test]
    fn prenoise_identity_v_equals_w_plus_az() {
        let a = gen_gaussian(10, 40, Seed(16)).unwrap();
        let x = gen_sparse_signal(40, 4, 1.0, Seed(17)).unwrap();
        let noise = NoiseSpec::new(0.5, 1.5).unwrap();
        let draw = measure_prenoise(&a, &x, &noise, Seed(21)).unwrap();
        // v is literally w + A z, and y is literally A x + v.
        let az = a.matvec(&draw.z).unwrap();
        let v = draw.w.add(&az).unwrap();
        assert_eq!(draw.v.as_slice(), v.as_slice());
        let y = a.matvec(&x.to_dense()).unwrap().add(&v).unwrap();
        assert_eq!(draw.y.as_slice(), y.as_slice());
        // The pre-noise form holds to rounding.
        let xz = x.to_dense().add(&draw.z).unwrap();
        let y2 = a.matvec(&xz).unwrap().add(&draw.w).unwrap();
        let dev = draw.y.sub(&y2).unwrap().norm();
        assert!(dev <= crate::tol::IDENTITY_REL * draw.y.norm(), "identity residual {dev}");
    }

    #[test]
    fn covariance_formula_special_cases() {
        let a = gen_gaussian(5, 20, Seed(31)).unwrap();
        let q = effective_noise_covariance(&a, &NoiseSpec::new(2.0, 0.0).unwrap());
        let dev = q.sub(&Matrix::identity(5).scaled(4.0)).unwrap().max_abs();
        assert_eq!(dev, 0.0);

        let ortho = crate::ensembles::gen_concat_orthobases(8, 4, Seed(13)).unwrap();
        let q = effective_noise_covariance(&ortho, &NoiseSpec::new(1.0, 1.0).unwrap());
        let dev = q.sub(&Matrix::identity(8).scaled(5.0)).unwrap().max_abs();
        assert!(dev <= 1e-10, "Q deviates from 5I by {dev}");
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = gen_gaussian(4, 8, Seed(1)).unwrap();
        let x = gen_sparse_signal(9, 2, 1.0, Seed(1)).unwrap();
        let noise = NoiseSpec::new(1.0, 1.0).unwrap();
        assert!(measure_standard(&a, &x, &noise, Seed(1)).is_err());
        assert!(measure_prenoise(&a, &x, &noise, Seed(1)).is_err());
    }
}
