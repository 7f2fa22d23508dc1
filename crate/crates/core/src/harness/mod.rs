//! Experiment harness: the paired noise-folding Monte Carlo sweep, the
//! theorem verification suite, and CSV emission.
//!
//! Determinism contract: a config file fixes every byte of the output CSV.
//! Trials are independent work items; each derives its own seed from
//! `(master_seed, trial_index)`, and the three models inside a trial share
//! the same noise draws so their error ratios isolate the model, not the
//! sample. Results are collected in (trial, model) order, which rayon's
//! indexed collect preserves for any worker count.

mod config;

pub use config::{parse_config, parse_config_str, Algorithm, ExperimentConfig};

use std::fmt;
use std::path::Path;

use rayon::prelude::*;

use crate::analysis::{estimate_noise_covariance, verify_prop1, verify_prop2};
use crate::ensembles::{gen_concat_orthobases, gen_gaussian};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{
    effective_noise_covariance, gen_sparse_signal, measure_prenoise, measure_standard, NoiseSpec,
};
use crate::recovery::{omp, squared_error, threshold_recover, RecoveryResult};
use crate::rng::Seed;
use crate::tol;
use crate::whitening::{apply_whitening, compute_eta, eta_gaussian_bound, folding_gamma, whiten};

/// Sub-stream of the master seed that generates the measurement matrix.
const STREAM_MATRIX: u64 = 0;
/// Sub-stream of the master seed that roots all per-trial streams.
const STREAM_TRIALS: u64 = 1;

pub fn matrix_seed(master_seed: u64) -> Seed {
    Seed(master_seed).stream(STREAM_MATRIX)
}

pub fn trial_seed(master_seed: u64, trial: u64) -> Seed {
    Seed(master_seed).stream(STREAM_TRIALS).stream(trial)
}

/// Which observation model a record came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ModelKind {
    /// Measurement noise only (the baseline).
    Standard,
    /// Pre-measurement noise, recovered naively with the original matrix.
    Prenoise,
    /// Pre-measurement noise, whitened and recovered with the whitened
    /// matrix.
    PrenoiseWhitened,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Standard => "standard",
            ModelKind::Prenoise => "prenoise",
            ModelKind::PrenoiseWhitened => "prenoise-whitened",
        })
    }
}

/// One row of sweep output.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub eta: f64,
    pub gamma: f64,
    pub model: ModelKind,
    pub squared_error: f64,
    pub support_recovered: bool,
}

fn recover(algorithm: Algorithm, m: &Matrix, y: &crate::linalg::Vector, s: usize) -> Result<RecoveryResult> {
    match algorithm {
        Algorithm::Omp => omp(m, y, s),
        Algorithm::Threshold => threshold_recover(m, y, s),
    }
}

/// Run the paired three-model sweep described by `config`.
///
/// `workers = 0` uses the default rayon pool; any positive count pins the
/// pool size. The output is byte-identical either way.
pub fn run_folding_sweep(config: &ExperimentConfig, workers: usize) -> Result<Vec<TrialRecord>> {
    with_pool(workers, || run_folding_sweep_inner(config))
}

fn run_folding_sweep_inner(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    let a = config.ensemble.generate()?;
    let noise = NoiseSpec::new(config.sigma, config.sigma0)?;
    let (n, p) = (config.ensemble.n, config.ensemble.p);
    let gamma = folding_gamma(config.sigma, config.sigma0, n, p)?.gamma;
    let eta = compute_eta(&a)?;
    let whitened = if config.whiten { Some(whiten(&a, &noise)?) } else { None };

    let per_trial: Vec<Result<Vec<TrialRecord>>> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = trial_seed(config.master_seed, trial);
            let x = gen_sparse_signal(p, config.s, config.amplitude, seed)?;
            let record = |model: ModelKind, fit: &RecoveryResult| -> Result<TrialRecord> {
                Ok(TrialRecord {
                    trial_index: trial,
                    eta,
                    gamma,
                    model,
                    squared_error: squared_error(&fit.xhat, &x)?,
                    support_recovered: fit.support == x.support,
                })
            };

            let mut rows = Vec::with_capacity(3);
            let standard = measure_standard(&a, &x, &noise, seed)?;
            let fit = recover(config.algorithm, &a, &standard.y, config.s)?;
            rows.push(record(ModelKind::Standard, &fit)?);

            let pre = measure_prenoise(&a, &x, &noise, seed)?;
            let fit = recover(config.algorithm, &a, &pre.y, config.s)?;
            rows.push(record(ModelKind::Prenoise, &fit)?);

            if let Some(sys) = &whitened {
                let y_w = apply_whitening(sys, &pre.y)?;
                let fit = recover(config.algorithm, &sys.b, &y_w, config.s)?;
                rows.push(record(ModelKind::PrenoiseWhitened, &fit)?);
            }
            Ok(rows)
        })
        .collect();

    let mut records = Vec::with_capacity(config.trials as usize * 3);
    for rows in per_trial {
        records.extend(rows?);
    }
    records.sort_by_key(|r| (r.trial_index, r.model));
    Ok(records)
}

/// CSV with the fixed header `trial,model,eta,gamma,squared_error,support_recovered`.
pub fn csv_string(records: &[TrialRecord]) -> String {
    let mut out = String::from("trial,model,eta,gamma,squared_error,support_recovered\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{:.16e},{:.16e},{:.16e},{}\n",
            r.trial_index, r.model, r.eta, r.gamma, r.squared_error, r.support_recovered
        ));
    }
    out
}

pub fn emit_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(records))?;
    Ok(())
}

/// Instance grid for the verification suite.
#[derive(Debug, Clone)]
pub struct VerificationConfig {
    pub n: usize,
    pub p: usize,
    pub s: usize,
    pub seeds: Vec<u64>,
    pub sigma: f64,
    pub sigma0: f64,
    pub subset_cap: u64,
    pub cov_draws: usize,
    pub t_bound: f64,
}

impl Default for VerificationConfig {
    fn default() -> Self {
        VerificationConfig {
            n: 16,
            p: 1024,
            s: 2,
            seeds: (1..=20).collect(),
            sigma: 1.0,
            sigma0: 1.0,
            subset_cap: tol::DEFAULT_SUBSET_CAP,
            cov_draws: 100_000,
            t_bound: 3.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub lines: Vec<String>,
    pub theorem_checks: usize,
    pub theorem_failures: usize,
}

impl VerificationReport {
    /// True when no theorem verdict with its hypothesis met has failed.
    pub fn passed(&self) -> bool {
        self.theorem_failures == 0
    }

    pub fn to_text(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out.push_str(&format!(
            "theorem checks: {} run, {} failed\n",
            self.theorem_checks, self.theorem_failures
        ));
        out
    }
}

/// Run proposition, eta-bound, and covariance checks across seeded
/// instances. Only theorem verdicts whose hypothesis is met count toward
/// failure; statistical checks are reported but cannot flip the status.
pub fn run_verification_suite(cfg: &VerificationConfig, workers: usize) -> Result<VerificationReport> {
    with_pool(workers, || run_verification_suite_inner(cfg))
}

fn run_verification_suite_inner(cfg: &VerificationConfig) -> Result<VerificationReport> {
    let mut lines = Vec::new();
    let mut checks = 0usize;
    let mut failures = 0usize;
    let noise = NoiseSpec::new(cfg.sigma, cfg.sigma0)?;
    let bound = eta_gaussian_bound(cfg.n, cfg.p, cfg.t_bound)?;
    let mut bound_hits = 0usize;

    for &seed in &cfg.seeds {
        let a = gen_gaussian(cfg.n, cfg.p, Seed(seed))?;
        let eta = compute_eta(&a)?;
        if eta <= bound {
            bound_hits += 1;
        }

        for (label, verdict) in [
            ("prop1", verify_prop1(&a, &noise, cfg.s, cfg.subset_cap)?),
            ("prop2", verify_prop2(&a, &noise)?),
        ] {
            if !verdict.hypothesis_met {
                lines.push(format!("SKIP {label} seed={seed} eta={eta:.6} out of hypothesis"));
                continue;
            }
            checks += 1;
            if verdict.holds {
                lines.push(format!(
                    "PASS {label} seed={seed} eta={eta:.6} margin={:.3e}",
                    verdict.margin
                ));
            } else {
                failures += 1;
                lines.push(format!(
                    "FAIL {label} seed={seed} eta={eta:.6} lhs={:.16e} rhs={:.16e}",
                    verdict.bound_lhs, verdict.bound_rhs
                ));
            }
        }
    }
    lines.push(format!(
        "INFO eta bound ({:.6}) held on {bound_hits}/{} instances",
        bound,
        cfg.seeds.len()
    ));

    // An orthobasis concatenation must sit at eta ~ 0.
    let r = if cfg.p.is_multiple_of(cfg.n) { cfg.p / cfg.n } else { 4 };
    let ortho = gen_concat_orthobases(cfg.n, r, Seed(cfg.seeds.first().copied().unwrap_or(1)))?;
    let eta_ortho = compute_eta(&ortho)?;
    lines.push(format!(
        "{} orthobasis eta={eta_ortho:.3e} (tolerance {:.1e})",
        if eta_ortho <= tol::ORTHOBASIS_GRAM_TOL { "PASS" } else { "FAIL" },
        tol::ORTHOBASIS_GRAM_TOL
    ));

    // A nearly square instance must be reported out of hypothesis, not failed.
    let squat = gen_gaussian(8, 10, Seed(cfg.seeds.first().copied().unwrap_or(1)))?;
    let verdict = verify_prop2(&squat, &noise)?;
    lines.push(format!(
        "{} out-of-hypothesis gate (n=8, p=10): hypothesis_met={}",
        if verdict.hypothesis_met { "FAIL" } else { "PASS" },
        verdict.hypothesis_met
    ));

    // Covariance estimates against their closed forms.
    if let Some(&seed) = cfg.seeds.first() {
        let a = gen_gaussian(cfg.n, cfg.p, Seed(seed))?;
        let q = effective_noise_covariance(&a, &noise);
        let q_hat = estimate_noise_covariance(&a, &noise, cfg.cov_draws, Seed(seed).stream(0xC0), false)?;
        let rel = q_hat.sub(&q)?.frobenius_norm() / q.frobenius_norm();
        lines.push(format!(
            "{} covariance unwhitened rel_err={rel:.4} (tolerance {})",
            if rel <= tol::MC_COVARIANCE_REL { "PASS" } else { "FAIL" },
            tol::MC_COVARIANCE_REL
        ));

        let gamma = folding_gamma(cfg.sigma, cfg.sigma0, cfg.n, cfg.p)?.gamma;
        let u_hat = estimate_noise_covariance(&a, &noise, cfg.cov_draws, Seed(seed).stream(0xC1), true)?;
        let target = Matrix::identity(cfg.n).scaled(gamma);
        let rel = u_hat.sub(&target)?.frobenius_norm() / (gamma * (cfg.n as f64).sqrt());
        lines.push(format!(
            "{} covariance whitened rel_err={rel:.4} (tolerance {})",
            if rel <= tol::MC_COVARIANCE_REL { "PASS" } else { "FAIL" },
            tol::MC_COVARIANCE_REL
        ));
    }

    Ok(VerificationReport { lines, theorem_checks: checks, theorem_failures: failures })
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if workers == 0 {
        f()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("could not build worker pool: {e}")))?;
        pool.install(f)
    }
}
