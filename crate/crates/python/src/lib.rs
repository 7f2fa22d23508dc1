//! Python bindings for the noisefold library.
//!
//! Matrices cross the boundary as `Matrix` objects (construct from nested
//! lists, read back with `tolist()`); vectors are plain Python lists of
//! floats. Seeds are explicit integers everywhere, exactly as in the Rust
//! API, so results match the CLI bit for bit.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use noisefold::ensembles;
use noisefold::model;
use noisefold::recovery;
use noisefold::rng::Seed;
use noisefold::whitening;
use noisefold::{analysis, tol};

fn to_py(e: noisefold::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vector(data: Vec<f64>) -> PyResult<noisefold::Vector> {
    noisefold::Vector::from_vec(data).map_err(to_py)
}

/// Dense row-major matrix of 64-bit floats.
#[pyclass(name = "Matrix")]
struct PyMatrix {
    inner: noisefold::Matrix,
}

#[pymethods]
impl PyMatrix {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        Ok(PyMatrix { inner: noisefold::Matrix::from_rows(&refs).map_err(to_py)? })
    }

    #[staticmethod]
    fn identity(n: usize) -> PyMatrix {
        PyMatrix { inner: noisefold::Matrix::identity(n) }
    }

    #[getter]
    fn rows(&self) -> usize {
        self.inner.rows()
    }

    #[getter]
    fn cols(&self) -> usize {
        self.inner.cols()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<f64> {
        if i >= self.inner.rows() || j >= self.inner.cols() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.inner[(i, j)])
    }

    fn tolist(&self) -> Vec<Vec<f64>> {
        (0..self.inner.rows()).map(|i| self.inner.row(i).to_vec()).collect()
    }

    fn matvec(&self, v: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.matvec(&vector(v)?).map_err(to_py)?.into())
    }

    fn __repr__(&self) -> String {
        format!("Matrix({}x{})", self.inner.rows(), self.inner.cols())
    }
}

/// The whitened system `y' = B x + u` with `cov(u) = gamma I`.
#[pyclass(name = "WhitenedSystem")]
struct PyWhitenedSystem {
    inner: whitening::WhitenedSystem,
}

#[pymethods]
impl PyWhitenedSystem {
    #[getter]
    fn b(&self) -> PyMatrix {
        PyMatrix { inner: self.inner.b.clone() }
    }

    #[getter]
    fn w(&self) -> PyMatrix {
        PyMatrix { inner: self.inner.w.clone() }
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.inner.eta
    }

    /// Apply the whitening transform to an observation.
    fn apply(&self, y: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(whitening::apply_whitening(&self.inner, &vector(y)?).map_err(to_py)?.into())
    }
}

#[pyclass(name = "SparseSignal")]
struct PySparseSignal {
    inner: model::SparseSignal,
}

#[pymethods]
impl PySparseSignal {
    #[new]
    fn new(p: usize, support: Vec<usize>, values: Vec<f64>) -> PyResult<Self> {
        Ok(PySparseSignal { inner: model::SparseSignal::new(p, support, values).map_err(to_py)? })
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p
    }

    #[getter]
    fn support(&self) -> Vec<usize> {
        self.inner.support.clone()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values.clone()
    }

    fn to_dense(&self) -> Vec<f64> {
        self.inner.to_dense().into()
    }
}

#[pyclass(name = "MeasurementDraw")]
struct PyMeasurementDraw {
    inner: model::MeasurementDraw,
}

#[pymethods]
impl PyMeasurementDraw {
    #[getter]
    fn y(&self) -> Vec<f64> {
        self.inner.y.clone().into()
    }

    #[getter]
    fn z(&self) -> Vec<f64> {
        self.inner.z.clone().into()
    }

    #[getter]
    fn w(&self) -> Vec<f64> {
        self.inner.w.clone().into()
    }

    #[getter]
    fn v(&self) -> Vec<f64> {
        self.inner.v.clone().into()
    }
}

#[pyclass(name = "RecoveryResult")]
struct PyRecoveryResult {
    inner: recovery::RecoveryResult,
}

#[pymethods]
impl PyRecoveryResult {
    #[getter]
    fn xhat(&self) -> Vec<f64> {
        self.inner.xhat.clone().into()
    }

    #[getter]
    fn support(&self) -> Vec<usize> {
        self.inner.support.clone()
    }

    #[getter]
    fn residual_norm(&self) -> f64 {
        self.inner.residual_norm
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }
}

#[pyclass(name = "RipReport")]
struct PyRipReport {
    inner: analysis::RipReport,
}

#[pymethods]
impl PyRipReport {
    #[getter]
    fn s(&self) -> usize {
        self.inner.s
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }

    #[getter]
    fn argmin_subset(&self) -> Vec<usize> {
        self.inner.argmin_subset.clone()
    }

    #[getter]
    fn argmax_subset(&self) -> Vec<usize> {
        self.inner.argmax_subset.clone()
    }

    #[getter]
    fn subsets_examined(&self) -> u64 {
        self.inner.subsets_examined
    }
}

#[pyclass(name = "PropositionVerdict")]
struct PyPropositionVerdict {
    inner: analysis::PropositionVerdict,
}

#[pymethods]
impl PyPropositionVerdict {
    #[getter]
    fn hypothesis_met(&self) -> bool {
        self.inner.hypothesis_met
    }

    #[getter]
    fn bound_lhs(&self) -> f64 {
        self.inner.bound_lhs
    }

    #[getter]
    fn bound_rhs(&self) -> f64 {
        self.inner.bound_rhs
    }

    #[getter]
    fn holds(&self) -> bool {
        self.inner.holds
    }

    #[getter]
    fn margin(&self) -> f64 {
        self.inner.margin
    }
}

#[pyfunction]
fn gen_gaussian(n: usize, p: usize, seed: u64) -> PyResult<PyMatrix> {
    Ok(PyMatrix { inner: ensembles::gen_gaussian(n, p, Seed(seed)).map_err(to_py)? })
}

#[pyfunction]
fn gen_bernoulli(n: usize, p: usize, seed: u64) -> PyResult<PyMatrix> {
    Ok(PyMatrix { inner: ensembles::gen_bernoulli(n, p, Seed(seed)).map_err(to_py)? })
}

#[pyfunction]
fn gen_sphere_columns(n: usize, p: usize, seed: u64) -> PyResult<PyMatrix> {
    Ok(PyMatrix { inner: ensembles::gen_sphere_columns(n, p, Seed(seed)).map_err(to_py)? })
}

#[pyfunction]
fn gen_concat_orthobases(n: usize, r: usize, seed: u64) -> PyResult<PyMatrix> {
    Ok(PyMatrix { inner: ensembles::gen_concat_orthobases(n, r, Seed(seed)).map_err(to_py)? })
}

/// Returns `(gamma, degradation)`; degradation is None when sigma = 0.
#[pyfunction]
fn folding_gamma(sigma: f64, sigma0: f64, n: usize, p: usize) -> PyResult<(f64, Option<f64>)> {
    let f = whitening::folding_gamma(sigma, sigma0, n, p).map_err(to_py)?;
    Ok((f.gamma, f.degradation))
}

#[pyfunction]
fn compute_eta(m: &PyMatrix) -> PyResult<f64> {
    whitening::compute_eta(&m.inner).map_err(to_py)
}

#[pyfunction]
fn eta_gaussian_bound(n: usize, p: usize, t: f64) -> PyResult<f64> {
    whitening::eta_gaussian_bound(n, p, t).map_err(to_py)
}

#[pyfunction]
fn eta1(eta: f64) -> PyResult<f64> {
    whitening::eta1(eta).map_err(to_py)
}

#[pyfunction]
fn eta2(eta: f64) -> PyResult<f64> {
    whitening::eta2(eta).map_err(to_py)
}

#[pyfunction]
fn eta3(eta: f64) -> PyResult<f64> {
    whitening::eta3(eta).map_err(to_py)
}

#[pyfunction]
fn whiten(m: &PyMatrix, sigma: f64, sigma0: f64) -> PyResult<PyWhitenedSystem> {
    let noise = model::NoiseSpec::new(sigma, sigma0).map_err(to_py)?;
    Ok(PyWhitenedSystem { inner: whitening::whiten(&m.inner, &noise).map_err(to_py)? })
}

#[pyfunction]
#[pyo3(signature = (m, s, subset_cap = tol::DEFAULT_SUBSET_CAP))]
fn rip_constants(m: &PyMatrix, s: usize, subset_cap: u64) -> PyResult<PyRipReport> {
    Ok(PyRipReport { inner: analysis::rip_constants(&m.inner, s, subset_cap).map_err(to_py)? })
}

#[pyfunction]
fn coherence(m: &PyMatrix) -> PyResult<f64> {
    analysis::coherence(&m.inner).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (m, sigma, sigma0, s, subset_cap = tol::DEFAULT_SUBSET_CAP))]
fn verify_prop1(m: &PyMatrix, sigma: f64, sigma0: f64, s: usize, subset_cap: u64) -> PyResult<PyPropositionVerdict> {
    let noise = model::NoiseSpec::new(sigma, sigma0).map_err(to_py)?;
    Ok(PyPropositionVerdict {
        inner: analysis::verify_prop1(&m.inner, &noise, s, subset_cap).map_err(to_py)?,
    })
}

#[pyfunction]
fn verify_prop2(m: &PyMatrix, sigma: f64, sigma0: f64) -> PyResult<PyPropositionVerdict> {
    let noise = model::NoiseSpec::new(sigma, sigma0).map_err(to_py)?;
    Ok(PyPropositionVerdict { inner: analysis::verify_prop2(&m.inner, &noise).map_err(to_py)? })
}

#[pyfunction]
fn estimate_noise_covariance(
    m: &PyMatrix,
    sigma: f64,
    sigma0: f64,
    draws: usize,
    seed: u64,
    whitened: bool,
) -> PyResult<PyMatrix> {
    let noise = model::NoiseSpec::new(sigma, sigma0).map_err(to_py)?;
    Ok(PyMatrix {
        inner: analysis::estimate_noise_covariance(&m.inner, &noise, draws, Seed(seed), whitened)
            .map_err(to_py)?,
    })
}

#[pyfunction]
fn gen_sparse_signal(p: usize, s: usize, amplitude: f64, seed: u64) -> PyResult<PySparseSignal> {
    Ok(PySparseSignal { inner: model::gen_sparse_signal(p, s, amplitude, Seed(seed)).map_err(to_py)? })
}

#[pyfunction]
fn measure_standard(m: &PyMatrix, x: &PySparseSignal, sigma: f64, sigma0: f64, seed: u64) -> PyResult<PyMeasurementDraw> {
    let noise = model::NoiseSpec::new(sigma, sigma0).map_err(to_py)?;
    Ok(PyMeasurementDraw {
        inner: model::measure_standard(&m.inner, &x.inner, &noise, Seed(seed)).map_err(to_py)?,
    })
}

#[pyfunction]
fn measure_prenoise(m: &PyMatrix, x: &PySparseSignal, sigma: f64, sigma0: f64, seed: u64) -> PyResult<PyMeasurementDraw> {
    let noise = model::NoiseSpec::new(sigma, sigma0).map_err(to_py)?;
    Ok(PyMeasurementDraw {
        inner: model::measure_prenoise(&m.inner, &x.inner, &noise, Seed(seed)).map_err(to_py)?,
    })
}

#[pyfunction]
fn omp(m: &PyMatrix, y: Vec<f64>, s: usize) -> PyResult<PyRecoveryResult> {
    Ok(PyRecoveryResult { inner: recovery::omp(&m.inner, &vector(y)?, s).map_err(to_py)? })
}

#[pyfunction]
fn threshold_recover(m: &PyMatrix, y: Vec<f64>, s: usize) -> PyResult<PyRecoveryResult> {
    Ok(PyRecoveryResult { inner: recovery::threshold_recover(&m.inner, &vector(y)?, s).map_err(to_py)? })
}

#[pyfunction]
fn squared_error(xhat: Vec<f64>, x: &PySparseSignal) -> PyResult<f64> {
    recovery::squared_error(&vector(xhat)?, &x.inner).map_err(to_py)
}

/// Run a folding sweep from config-file text and return the CSV as a
/// string (the `output_path` key is parsed but not written to).
#[pyfunction]
#[pyo3(signature = (config_text, workers = 0))]
fn sweep_csv(config_text: &str, workers: usize) -> PyResult<String> {
    let config = noisefold::harness::parse_config_str(config_text, "<python>").map_err(to_py)?;
    let records = noisefold::harness::run_folding_sweep(&config, workers).map_err(to_py)?;
    Ok(noisefold::harness::csv_string(&records))
}

#[pymodule]
fn noisefold_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMatrix>()?;
    m.add_class::<PyWhitenedSystem>()?;
    m.add_class::<PySparseSignal>()?;
    m.add_class::<PyMeasurementDraw>()?;
    m.add_class::<PyRecoveryResult>()?;
    m.add_class::<PyRipReport>()?;
    m.add_class::<PyPropositionVerdict>()?;
    m.add_function(wrap_pyfunction!(gen_gaussian, m)?)?;
    m.add_function(wrap_pyfunction!(gen_bernoulli, m)?)?;
    m.add_function(wrap_pyfunction!(gen_sphere_columns, m)?)?;
    m.add_function(wrap_pyfunction!(gen_concat_orthobases, m)?)?;
    m.add_function(wrap_pyfunction!(folding_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(compute_eta, m)?)?;
    m.add_function(wrap_pyfunction!(eta_gaussian_bound, m)?)?;
    m.add_function(wrap_pyfunction!(eta1, m)?)?;
    m.add_function(wrap_pyfunction!(eta2, m)?)?;
    m.add_function(wrap_pyfunction!(eta3, m)?)?;
    m.add_function(wrap_pyfunction!(whiten, m)?)?;
    m.add_function(wrap_pyfunction!(rip_constants, m)?)?;
    m.add_function(wrap_pyfunction!(coherence, m)?)?;
    m.add_function(wrap_pyfunction!(verify_prop1, m)?)?;
    m.add_function(wrap_pyfunction!(verify_prop2, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_noise_covariance, m)?)?;
    m.add_function(wrap_pyfunction!(gen_sparse_signal, m)?)?;
    m.add_function(wrap_pyfunction!(measure_standard, m)?)?;
    m.add_function(wrap_pyfunction!(measure_prenoise, m)?)?;
    m.add_function(wrap_pyfunction!(omp, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_recover, m)?)?;
    m.add_function(wrap_pyfunction!(squared_error, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_csv, m)?)?;
    Ok(())
}
