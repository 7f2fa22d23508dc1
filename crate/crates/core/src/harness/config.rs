//! Flat `key = value` experiment configuration files.
//!
//! One pair per line, `#` starts a comment, unknown or duplicate keys are
//! rejected with their line number. The matrix seed is derived from
//! `master_seed`, so a config file pins the entire experiment.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::ensembles::{EnsembleSpec, Family};
use crate::error::{Error, Result};
use crate::tol;

use super::matrix_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Omp,
    Threshold,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Omp => "omp",
            Algorithm::Threshold => "threshold",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Algorithm> {
        match s {
            "omp" => Ok(Algorithm::Omp),
            "threshold" => Ok(Algorithm::Threshold),
            other => Err(Error::InvalidParameter(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// Everything one folding-sweep run depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub ensemble: EnsembleSpec,
    pub s: usize,
    pub amplitude: f64,
    pub sigma: f64,
    pub sigma0: f64,
    pub trials: u64,
    pub algorithm: Algorithm,
    pub whiten: bool,
    pub master_seed: u64,
    pub output_path: String,
    pub subset_cap: u64,
}

impl ExperimentConfig {
    /// Emit a config file body that parses back to `self`.
    pub fn to_config_string(&self) -> String {
        format!(
            "family = {}\nn = {}\np = {}\ns = {}\namplitude = {}\nsigma = {}\nsigma0 = {}\ntrials = {}\nalgorithm = {}\nwhiten = {}\nmaster_seed = {}\noutput_path = {}\nsubset_cap = {}\n",
            self.ensemble.family,
            self.ensemble.n,
            self.ensemble.p,
            self.s,
            crate::io::format_f64(self.amplitude),
            crate::io::format_f64(self.sigma),
            crate::io::format_f64(self.sigma0),
            self.trials,
            self.algorithm,
            self.whiten,
            self.master_seed,
            self.output_path,
            self.subset_cap,
        )
    }
}

const KNOWN_KEYS: [&str; 14] = [
    "family", "n", "p", "r", "s", "amplitude", "sigma", "sigma0", "trials", "algorithm", "whiten",
    "master_seed", "output_path", "subset_cap",
];

struct RawConfig<'a> {
    path: &'a str,
    entries: HashMap<String, (usize, String)>,
}

impl<'a> RawConfig<'a> {
    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Config { path: self.path.to_string(), line, msg: msg.into() }
    }

    fn required(&self, key: &str) -> Result<&(usize, String)> {
        self.entries
            .get(key)
            .ok_or_else(|| self.err(0, format!("missing required key `{key}`")))
    }

    fn parse_required<T: FromStr>(&self, key: &str, what: &str) -> Result<T> {
        let (line, value) = self.required(key)?;
        value
            .parse::<T>()
            .map_err(|_| self.err(*line, format!("key `{key}` must be {what}, got `{value}`")))
    }

    fn parse_optional<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<(usize, T)>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, value)) => value
                .parse::<T>()
                .map(|v| Some((*line, v)))
                .map_err(|_| self.err(*line, format!("key `{key}` must be {what}, got `{value}`"))),
        }
    }
}

pub fn parse_config_str(text: &str, path_label: &str) -> Result<ExperimentConfig> {
    let raw = scan_pairs(text, path_label)?;

    let family: Family = raw.parse_required("family", "a matrix family")?;
    let n: usize = raw.parse_required("n", "a positive integer")?;
    let r = raw.parse_optional::<usize>("r", "a positive integer")?;
    let p_entry = raw.parse_optional::<usize>("p", "a positive integer")?;

    if family != Family::ConcatOrthobases {
        if let Some((line, _)) = r {
            return Err(raw.err(line, "key `r` is only valid for family concat-orthobases"));
        }
    }
    let p = match (p_entry, r) {
        (Some((_, p)), None) => p,
        (None, Some((_, r))) => n
            .checked_mul(r)
            .ok_or_else(|| raw.err(0, "r * n overflows"))?,
        (Some((line, p)), Some((_, r))) => {
            if p != n * r {
                return Err(raw.err(line, format!("p = {p} contradicts r * n = {}", n * r)));
            }
            p
        }
        (None, None) => return Err(raw.err(0, "missing required key `p`")),
    };

    let master_seed: u64 = raw.parse_required("master_seed", "a 64-bit unsigned integer")?;
    let ensemble = EnsembleSpec::new(family, n, p, matrix_seed(master_seed).0)
        .map_err(|e| raw.err(0, e.to_string()))?;

    let s: usize = raw.parse_required("s", "a positive integer")?;
    if s < 1 {
        return Err(raw.err(raw.required("s")?.0, "s must be at least 1"));
    }
    let amplitude: f64 = raw.parse_required("amplitude", "a positive real")?;
    if amplitude <= 0.0 || !amplitude.is_finite() {
        return Err(raw.err(raw.required("amplitude")?.0, "amplitude must be positive and finite"));
    }
    let sigma: f64 = raw.parse_required("sigma", "a non-negative real")?;
    let sigma0: f64 = raw.parse_required("sigma0", "a non-negative real")?;
    for (key, value) in [("sigma", sigma), ("sigma0", sigma0)] {
        if !value.is_finite() || value < 0.0 {
            return Err(raw.err(raw.required(key)?.0, format!("{key} must be non-negative and finite")));
        }
    }
    let trials: u64 = raw.parse_required("trials", "a positive integer")?;
    if trials < 1 {
        return Err(raw.err(raw.required("trials")?.0, "trials must be at least 1"));
    }
    let algorithm: Algorithm = raw.parse_required("algorithm", "one of omp, threshold")?;
    let whiten: bool = raw.parse_required("whiten", "true or false")?;
    let output_path = raw.required("output_path")?.1.clone();
    let subset_cap = raw
        .parse_optional::<u64>("subset_cap", "a positive integer")?
        .map_or(tol::DEFAULT_SUBSET_CAP, |(_, v)| v);

    Ok(ExperimentConfig {
        ensemble,
        s,
        amplitude,
        sigma,
        sigma0,
        trials,
        algorithm,
        whiten,
        master_seed,
        output_path,
        subset_cap,
    })
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text, &path.display().to_string())
}

fn scan_pairs<'a>(text: &str, path_label: &'a str) -> Result<RawConfig<'a>> {
    let mut entries: HashMap<String, (usize, String)> = HashMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let config_err = |msg: String| Error::Config { path: path_label.to_string(), line: line_no, msg };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err("expected `key = value`".to_string()))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(config_err("expected `key = value`".to_string()));
        }
        if !KNOWN_KEYS.contains(&key) {
            return Err(config_err(format!("unknown key `{key}`")));
        }
        if entries.insert(key.to_string(), (line_no, value.to_string())).is_some() {
            return Err(config_err(format!("duplicate key `{key}`")));
        }
    }
    Ok(RawConfig { path: path_label, entries })
}
