//! Seeded construction of random measurement-matrix families.
//!
//! Four families cover the standard compressed-sensing ensembles: i.i.d.
//! Gaussian entries with variance 1/n, i.i.d. symmetric Bernoulli entries
//! of magnitude 1/sqrt(n), columns drawn uniformly on the unit sphere, and
//! concatenations of r orthonormal bases (for which `A A^T = (p/n) I`
//! holds by construction). Generation is a pure function of the spec, so a
//! given `(family, n, p, seed)` yields the same matrix bit-for-bit on every
//! call.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{orthonormalize_square, Matrix};
use crate::rng::{Seed, SplitMix64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Gaussian,
    Bernoulli,
    SphereColumns,
    ConcatOrthobases,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Family::Gaussian => "gaussian",
            Family::Bernoulli => "bernoulli",
            Family::SphereColumns => "sphere-columns",
            Family::ConcatOrthobases => "concat-orthobases",
        };
        f.write_str(name)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        match s {
            "gaussian" => Ok(Family::Gaussian),
            "bernoulli" => Ok(Family::Bernoulli),
            "sphere-columns" => Ok(Family::SphereColumns),
            "concat-orthobases" => Ok(Family::ConcatOrthobases),
            other => Err(Error::InvalidParameter(format!("unknown family `{other}`"))),
        }
    }
}

/// Recipe for a reproducible measurement matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub family: Family,
    pub n: usize,
    pub p: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(family: Family, n: usize, p: usize, seed: u64) -> Result<EnsembleSpec> {
        if n < 1 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if p < n {
            return Err(Error::InvalidParameter(format!("p = {p} must be at least n = {n}")));
        }
        if family == Family::ConcatOrthobases && !p.is_multiple_of(n) {
            return Err(Error::InvalidParameter(format!(
                "concat-orthobases needs p a multiple of n, got p = {p}, n = {n}"
            )));
        }
        Ok(EnsembleSpec { family, n, p, seed })
    }

    /// Materialize the matrix this spec describes.
    pub fn generate(&self) -> Result<Matrix> {
        match self.family {
            Family::Gaussian => gen_gaussian(self.n, self.p, Seed(self.seed)),
            Family::Bernoulli => gen_bernoulli(self.n, self.p, Seed(self.seed)),
            Family::SphereColumns => gen_sphere_columns(self.n, self.p, Seed(self.seed)),
            Family::ConcatOrthobases => gen_concat_orthobases(self.n, self.p / self.n, Seed(self.seed)),
        }
    }
}

fn check_dims(n: usize, p: usize) -> Result<()> {
    if n == 0 || p == 0 {
        return Err(Error::InvalidParameter("matrix dimensions must be positive".into()));
    }
    Ok(())
}

/// i.i.d. N(0, 1/n) entries.
pub fn gen_gaussian(n: usize, p: usize, seed: Seed) -> Result<Matrix> {
    check_dims(n, p)?;
    let scale = 1.0 / (n as f64).sqrt();
    let mut rng = SplitMix64::new(seed);
    let data = (0..n * p).map(|_| scale * rng.next_normal()).collect();
    Matrix::from_vec(n, p, data)
}

/// i.i.d. equiprobable +/- 1/sqrt(n) entries.
pub fn gen_bernoulli(n: usize, p: usize, seed: Seed) -> Result<Matrix> {
    check_dims(n, p)?;
    let scale = 1.0 / (n as f64).sqrt();
    let mut rng = SplitMix64::new(seed);
    let data = (0..n * p).map(|_| scale * rng.next_sign()).collect();
    Matrix::from_vec(n, p, data)
}

/// Columns i.i.d. uniform on the unit sphere in R^n (normalized Gaussian
/// draws; an exactly-zero draw is regenerated).
pub fn gen_sphere_columns(n: usize, p: usize, seed: Seed) -> Result<Matrix> {
    check_dims(n, p)?;
    let mut rng = SplitMix64::new(seed);
    let mut data = vec![0.0; n * p];
    for j in 0..p {
        loop {
            let col = rng.normals(n);
            let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                for (i, x) in col.iter().enumerate() {
                    data[i * p + j] = x / norm;
                }
                break;
            }
        }
    }
    Matrix::from_vec(n, p, data)
}

/// Concatenation `[A_1 ... A_r]` of r seeded orthonormal bases, each the
/// Q factor (R diagonal non-negative) of an n x n Gaussian draw. The block
/// structure forces `A A^T = r I`.
pub fn gen_concat_orthobases(n: usize, r: usize, seed: Seed) -> Result<Matrix> {
    if n == 0 || r == 0 {
        return Err(Error::InvalidParameter("n and r must be positive".into()));
    }
    let p = n * r;
    let mut data = vec![0.0; n * p];
    for block in 0..r {
        // Each basis gets its own sub-stream so r does not shift earlier blocks.
        let mut rng = SplitMix64::new(Seed(seed.0).stream(block as u64));
        let g = Matrix::from_vec(n, n, rng.normals(n * n))?;
        let q = orthonormalize_square(&g)?;
        for i in 0..n {
            for j in 0..n {
                data[i * p + block * n + j] = q[(i, j)];
            }
        }
    }
    Matrix::from_vec(n, p, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;

    #[test]
    fn gaussian_is_deterministic() {
        let a = gen_gaussian(1, 1, Seed(77)).unwrap();
        let b = gen_gaussian(1, 1, Seed(77)).unwrap();
        assert_eq!(a.as_slice(), b.as_slice());
        let big_a = gen_gaussian(30, 50, Seed(5)).unwrap();
        let big_b = gen_gaussian(30, 50, Seed(5)).unwrap();
        assert_eq!(big_a.as_slice(), big_b.as_slice());
        assert_ne!(big_a.as_slice(), gen_gaussian(30, 50, Seed(6)).unwrap().as_slice());
    }

    #[test]
    fn gaussian_moments() {
        let (n, p) = (100, 400);
        let a = gen_gaussian(n, p, Seed(1)).unwrap();
        let count = (n * p) as f64;
        let mean = a.as_slice().iter().sum::<f64>() / count;
        // CLT: sample mean of n*p entries with variance 1/n.
        let bound = 4.0 / ((n as f64) * count).sqrt();
        assert!(mean.abs() < bound, "mean {mean} vs bound {bound}");
        let var = a.as_slice().iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (count - 1.0);
        let target = 1.0 / n as f64;
        assert!((var - target).abs() < 0.1 * target, "variance {var}");
    }

    #[test]
    fn bernoulli_entries_and_column_norms() {
        let (n, p) = (50, 200);
        let a = gen_bernoulli(n, p, Seed(3)).unwrap();
        let mag = 1.0 / (n as f64).sqrt();
        for &x in a.as_slice() {
            assert!(x == mag || x == -mag);
        }
        for j in 0..p {
            let sq: f64 = (0..n).map(|i| a[(i, j)] * a[(i, j)]).sum();
            assert!((sq - 1.0).abs() <= 1e-12);
        }
        let positive = a.as_slice().iter().filter(|&&x| x > 0.0).count() as f64;
        let frac = positive / (n * p) as f64;
        assert!((frac - 0.5).abs() < 0.07, "positive fraction {frac}");
    }

    #[test]
    fn sphere_columns_are_unit_and_centered() {
        let (n, p) = (3, 1000);
        let a = gen_sphere_columns(n, p, Seed(9)).unwrap();
        for j in 0..p {
            assert!((a.col_norm(j) - 1.0).abs() <= 1e-12);
        }
        for i in 0..n {
            let coord_mean: f64 = (0..p).map(|j| a[(i, j)]).sum::<f64>() / p as f64;
            assert!(coord_mean.abs() < 0.05, "coordinate {i} mean {coord_mean}");
        }
        assert_eq!(
            a.as_slice(),
            gen_sphere_columns(n, p, Seed(9)).unwrap().as_slice()
        );
    }

    #[test]
    fn orthobases_gram_is_scaled_identity() {
        let a = gen_concat_orthobases(4, 2, Seed(7)).unwrap();
        let gram = a.outer_gram();
        let dev = gram.sub(&Matrix::identity(4).scaled(2.0)).unwrap().max_abs();
        assert!(dev <= tol::ORTHOBASIS_GRAM_TOL, "max dev {dev}");
    }

    #[test]
    fn orthobases_r1_is_orthogonal() {
        let a = gen_concat_orthobases(6, 1, Seed(2)).unwrap();
        let dev = a.outer_gram().sub(&Matrix::identity(6)).unwrap().max_abs();
        assert!(dev <= tol::ORTHOBASIS_GRAM_TOL);
        let eta = crate::whitening::compute_eta(&a).unwrap();
        assert!(eta <= tol::ORTHOBASIS_GRAM_TOL, "eta {eta}");
    }

    #[test]
    fn spec_validation() {
        assert!(EnsembleSpec::new(Family::Gaussian, 0, 4, 1).is_err());
        assert!(EnsembleSpec::new(Family::Gaussian, 8, 4, 1).is_err());
        assert!(EnsembleSpec::new(Family::ConcatOrthobases, 4, 10, 1).is_err());
        assert!(EnsembleSpec::new(Family::ConcatOrthobases, 4, 12, 1).is_ok());
    }

    #[test]
    fn distinct_streams_are_decorrelated() {
        let master = Seed(99);
        let a = gen_gaussian(100, 120, master.stream(0)).unwrap();
        let b = gen_gaussian(100, 120, master.stream(1)).unwrap();
        let n = a.as_slice().len() as f64;
        let ma = a.as_slice().iter().sum::<f64>() / n;
        let mb = b.as_slice().iter().sum::<f64>() / n;
        let cov: f64 = a
            .as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| (x - ma) * (y - mb))
            .sum();
        let sa: f64 = a.as_slice().iter().map(|x| (x - ma) * (x - ma)).sum::<f64>().sqrt();
        let sb: f64 = b.as_slice().iter().map(|x| (x - mb) * (x - mb)).sum::<f64>().sqrt();
        let corr = cov / (sa * sb);
        assert!(corr.abs() < 0.05, "correlation {corr}");
    }

    #[test]
    fn family_names_round_trip() {
        for f in [Family::Gaussian, Family::Bernoulli, Family::SphereColumns, Family::ConcatOrthobases] {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert!("fourier".parse::<Family>().is_err());
    }
}
