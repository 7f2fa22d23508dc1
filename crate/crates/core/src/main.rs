//! Command-line harness around the noisefold library.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 numerical
//! precondition violation, 3 theorem verification failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use noisefold::analysis::{coherence, rip_constants};
use noisefold::ensembles::{EnsembleSpec, Family};
use noisefold::error::Result;
use noisefold::harness::{
    emit_csv, parse_config, run_folding_sweep, run_verification_suite, Algorithm,
    VerificationConfig,
};
use noisefold::io;
use noisefold::model::NoiseSpec;
use noisefold::recovery::{omp, threshold_recover};
use noisefold::tol;
use noisefold::whitening::{compute_eta, whiten};

#[derive(Parser)]
#[command(name = "noisefold", version, about = "Noise folding in compressed sensing: ensembles, whitening, RIP/coherence certificates, and Monte Carlo sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded measurement matrix and write it as text
    Gen(GenArgs),
    /// Print eta = |I - (n/p) A A^T|_2 of a matrix file
    Eta(MatrixArg),
    /// Print the mutual coherence of a matrix file
    Coherence(MatrixArg),
    /// Certify RIP constants of order s by exhaustive enumeration
    Rip(RipArgs),
    /// Whiten a matrix under the given noise levels
    Whiten(WhitenArgs),
    /// Recover a sparse signal from an observation vector
    Recover(RecoverArgs),
    /// Run the paired noise-folding Monte Carlo sweep from a config file
    Sweep(SweepArgs),
    /// Run the proposition verification suite
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Matrix family: gaussian, bernoulli, sphere-columns, concat-orthobases
    #[arg(long)]
    family: String,
    /// Number of rows (measurements)
    #[arg(long)]
    n: usize,
    /// Number of columns (signal dimension); orthobases may give --r instead
    #[arg(long)]
    p: Option<usize>,
    /// Number of orthonormal basis blocks (concat-orthobases only)
    #[arg(long)]
    r: Option<usize>,
    /// Generator seed (all randomness is explicit; there is no wall-clock seeding)
    #[arg(long)]
    seed: u64,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MatrixArg {
    /// Matrix file in the `n p` header text format
    #[arg(long)]
    matrix: PathBuf,
}

#[derive(Args)]
struct RipArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Sparsity order
    #[arg(long)]
    s: usize,
    /// Ceiling on C(p, s); enumeration refuses beyond it
    #[arg(long, default_value_t = tol::DEFAULT_SUBSET_CAP)]
    subset_cap: u64,
    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct WhitenArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    sigma: f64,
    #[arg(long)]
    sigma0: f64,
    /// Write the whitened matrix B here
    #[arg(long)]
    out_b: Option<PathBuf>,
    /// Write the whitening transform W here
    #[arg(long)]
    out_w: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Observation vector file
    #[arg(long)]
    y: PathBuf,
    /// Sparsity budget
    #[arg(long)]
    s: usize,
    /// omp or threshold
    #[arg(long, default_value = "omp")]
    algorithm: String,
    /// Write the dense estimate here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Experiment config file (flat key = value lines)
    #[arg(long)]
    config: PathBuf,
    /// Worker threads (0 = all cores); output is identical either way
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 16)]
    n: usize,
    #[arg(long, default_value_t = 1024)]
    p: usize,
    #[arg(long, default_value_t = 2)]
    s: usize,
    /// First instance seed
    #[arg(long, default_value_t = 1)]
    first_seed: u64,
    /// Number of seeded instances
    #[arg(long, default_value_t = 20)]
    instances: u64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma0: f64,
    #[arg(long, default_value_t = tol::DEFAULT_SUBSET_CAP)]
    subset_cap: u64,
    /// Draw count for the covariance estimates
    #[arg(long, default_value_t = 100_000)]
    cov_draws: usize,
    /// Concentration parameter t in the eta bound
    #[arg(long, default_value_t = 3.0)]
    t: f64,
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own exit code convention differs; map usage errors to 1.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen(args) => {
            let family: Family = args.family.parse()?;
            let p = match (args.p, args.r) {
                (Some(p), None) => p,
                (None, Some(r)) => args.n * r,
                (Some(p), Some(r)) if p == args.n * r => p,
                (Some(_), Some(_)) => {
                    return Err(noisefold::Error::InvalidParameter("--p contradicts --r * --n".into()))
                }
                (None, None) => {
                    return Err(noisefold::Error::InvalidParameter("give --p (or --r for concat-orthobases)".into()))
                }
            };
            let spec = EnsembleSpec::new(family, args.n, p, args.seed)?;
            let matrix = spec.generate()?;
            match args.out {
                Some(path) => io::write_matrix(&path, &matrix)?,
                None => print!("{}", io::matrix_to_string(&matrix)),
            }
        }
        Command::Eta(args) => {
            let matrix = io::read_matrix(&args.matrix)?;
            println!("{}", io::format_f64(compute_eta(&matrix)?));
        }
        Command::Coherence(args) => {
            let matrix = io::read_matrix(&args.matrix)?;
            println!("{}", io::format_f64(coherence(&matrix)?));
        }
        Command::Rip(args) => {
            let matrix = io::read_matrix(&args.matrix)?;
            let report = with_workers(args.workers, || rip_constants(&matrix, args.s, args.subset_cap))?;
            print!("{}", report.to_kv());
        }
        Command::Whiten(args) => {
            let matrix = io::read_matrix(&args.matrix)?;
            let noise = NoiseSpec::new(args.sigma, args.sigma0)?;
            let sys = whiten(&matrix, &noise)?;
            println!("gamma={}", io::format_f64(sys.gamma));
            println!("eta={}", io::format_f64(sys.eta));
            if args.sigma > 0.0 {
                println!(
                    "degradation={}",
                    io::format_f64(sys.gamma / (args.sigma * args.sigma))
                );
            }
            if let Some(path) = args.out_b {
                io::write_matrix(&path, &sys.b)?;
            }
            if let Some(path) = args.out_w {
                io::write_matrix(&path, &sys.w)?;
            }
        }
        Command::Recover(args) => {
            let matrix = io::read_matrix(&args.matrix)?;
            let y = io::read_vector(&args.y)?;
            let algorithm: Algorithm = args.algorithm.parse()?;
            let result = match algorithm {
                Algorithm::Omp => omp(&matrix, &y, args.s)?,
                Algorithm::Threshold => threshold_recover(&matrix, &y, args.s)?,
            };
            println!(
                "support={}",
                result.support.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
            );
            println!("residual_norm={}", io::format_f64(result.residual_norm));
            println!("iterations={}", result.iterations);
            if let Some(path) = args.out {
                io::write_vector(&path, &result.xhat)?;
            }
        }
        Command::Sweep(args) => {
            let config = parse_config(&args.config)?;
            let records = run_folding_sweep(&config, args.workers)?;
            emit_csv(&records, std::path::Path::new(&config.output_path))?;
            eprintln!(
                "wrote {} records ({} trials) to {}",
                records.len(),
                config.trials,
                config.output_path
            );
        }
        Command::Verify(args) => {
            let cfg = VerificationConfig {
                n: args.n,
                p: args.p,
                s: args.s,
                seeds: (args.first_seed..args.first_seed + args.instances).collect(),
                sigma: args.sigma,
                sigma0: args.sigma0,
                subset_cap: args.subset_cap,
                cov_draws: args.cov_draws,
                t_bound: args.t,
            };
            let report = run_verification_suite(&cfg, args.workers)?;
            print!("{}", report.to_text());
            if !report.passed() {
                return Ok(ExitCode::from(3));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if workers == 0 {
        return f();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| noisefold::Error::InvalidParameter(format!("could not build worker pool: {e}")))?;
    pool.install(f)
}
