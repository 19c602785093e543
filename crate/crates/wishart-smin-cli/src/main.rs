//! Command-line front end for the `wishart-smin` library.
//!
//! One subcommand per pipeline: exact closed forms (`density`, `ft-density`,
//! `moments`), spectral marginals (`marginal`), Monte Carlo sampling (`mc`),
//! soft-edge limits (`tw`), and the coupled-kicked-tops simulation
//! (`kicked`). Every run is deterministic given its flags: identical flags
//! produce byte-identical primary outputs. File-writing runs leave a
//! `<out>.manifest.json` sidecar recording the flags, tool version, and wall
//! time so any output can be reproduced from the manifest alone.
//!
//! Exit codes: 0 success, 2 usage error (bad flags or parameters), 3
//! numerical or I/O failure.

mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "wishart-smin-cli",
    version,
    about = "Smallest-eigenvalue laws of complex Wishart matrices: exact forms, Monte Carlo, soft-edge limits, and kicked-top spectra",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact smallest-eigenvalue density of the regular ensemble.
    Density(DensityArgs),
    /// Exact smallest-eigenvalue density of the fixed-trace ensemble.
    FtDensity(FtDensityArgs),
    /// Exact (rational) smallest-eigenvalue moments ⟨x^η⟩.
    Moments(MomentsArgs),
    /// Spectral marginal densities (full eigenvalue distribution).
    Marginal(MarginalArgs),
    /// Monte Carlo smallest-eigenvalue samples with a fixed seed.
    Mc(McArgs),
    /// Tracy–Widom (β=2) density and soft-edge-rescaled exact densities.
    Tw(TwArgs),
    /// Coupled-kicked-tops Floquet run: Schmidt spectra and fit summary.
    Kicked(KickedArgs),
}

/// Matrix dimensions shared by the ensemble subcommands.
#[derive(Args)]
struct EnsembleArgs {
    /// Matrix dimension n (rows of the Gaussian block; n ≥ 1)
    #[arg(long)]
    n: u32,
    /// Matrix dimension m (columns of the Gaussian block; m ≥ n)
    #[arg(long)]
    m: u32,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    dims: EnsembleArgs,
    /// Evaluation grid `a:b:N` (inclusive endpoints, N points); requires --out
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Output file for the grid (CSV or JSON per --format)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid file format
    #[arg(long, value_enum, default_value_t = GridFormat::Csv)]
    format: GridFormat,
    /// Exact density value at a rational point x (integer or `p/q`)
    #[arg(long, allow_hyphen_values = true)]
    exact_at: Option<String>,
}

#[derive(Args)]
struct FtDensityArgs {
    #[command(flatten)]
    dims: EnsembleArgs,
    /// Evaluation grid `a:b:N` (inclusive endpoints, N points); requires --out
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Output file for the grid (CSV or JSON per --format)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid file format
    #[arg(long, value_enum, default_value_t = GridFormat::Csv)]
    format: GridFormat,
    /// Exact density value at a rational point x (integer or `p/q`)
    #[arg(long, allow_hyphen_values = true)]
    exact_at: Option<String>,
}

#[derive(Args)]
struct MomentsArgs {
    #[command(flatten)]
    dims: EnsembleArgs,
    /// Moment order η (integers give exact rationals)
    #[arg(long, allow_hyphen_values = true)]
    eta: f64,
    /// Use the fixed-trace ensemble instead of the regular one
    #[arg(long)]
    fixed_trace: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MarginalKind {
    /// Full eigenvalue density of the regular ensemble (Wronskian form)
    Regular,
    /// Same density by the kernel-diagonal sum (cross-check form)
    Sum,
    /// Exact fixed-trace marginal on [0, 1]
    FixedTrace,
    /// Rescaled regular marginal mn·p(mn·μ) approximating the fixed-trace one
    Scaled,
    /// Marčenko–Pastur limit density in fixed-trace scaling
    Mp,
}

#[derive(Args)]
struct MarginalArgs {
    #[command(flatten)]
    dims: EnsembleArgs,
    /// Which marginal to evaluate
    #[arg(long, value_enum)]
    kind: MarginalKind,
    /// Evaluation grid `a:b:N` (inclusive endpoints, N points)
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    /// Output file (CSV or JSON per --format)
    #[arg(long)]
    out: PathBuf,
    /// Grid file format
    #[arg(long, value_enum, default_value_t = GridFormat::Csv)]
    format: GridFormat,
}

#[derive(Args)]
struct McArgs {
    #[command(flatten)]
    dims: EnsembleArgs,
    /// Number of samples
    #[arg(long)]
    count: usize,
    /// RNG seed (identical seeds give byte-identical output)
    #[arg(long)]
    seed: u64,
    /// Sample the fixed-trace ensemble instead of the regular one
    #[arg(long)]
    fixed_trace: bool,
    /// Output CSV file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TwArgs {
    #[command(flatten)]
    dims: EnsembleArgs,
    /// Grid `a:b:N` in the soft-edge variable s
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    /// Quadrature nodes for the Fredholm determinant
    #[arg(long, default_value_t = 80)]
    nodes: usize,
    /// Output CSV file (columns s,tracy_widom,rescaled_regular,rescaled_fixed_trace)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct KickedArgs {
    /// Spin of the first top (half-integer ≥ 1/2; N1 = 2j1+1)
    #[arg(long)]
    j1: f64,
    /// Spin of the second top (half-integer ≥ j1; N2 = 2j2+1)
    #[arg(long)]
    j2: f64,
    /// Kick strength of the first top
    #[arg(long, allow_hyphen_values = true)]
    k1: f64,
    /// Kick strength of the second top
    #[arg(long, allow_hyphen_values = true)]
    k2: f64,
    /// Coupling strength ε
    #[arg(long, allow_hyphen_values = true)]
    eps: f64,
    /// Polar angle of the first top's initial coherent state
    #[arg(long, default_value_t = 1.90)]
    theta1: f64,
    /// Azimuthal angle of the first top's initial coherent state
    #[arg(long, default_value_t = 2.80)]
    phi1: f64,
    /// Polar angle of the second top's initial coherent state
    #[arg(long, default_value_t = 0.70)]
    theta2: f64,
    /// Azimuthal angle of the second top's initial coherent state
    #[arg(long, default_value_t = 5.10)]
    phi2: f64,
    /// Initial periods to discard before recording
    #[arg(long, default_value_t = 500)]
    skip: usize,
    /// Periods between recorded states
    #[arg(long, default_value_t = 20)]
    stride: usize,
    /// Number of recorded spectra
    #[arg(long, default_value_t = 2000)]
    count: usize,
    /// Declare that the run uses no randomness (accepted for scripting
    /// symmetry with `mc --seed`; the evolution is always deterministic)
    #[arg(long)]
    seedless: bool,
    /// Output CSV file (one Schmidt spectrum per line)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridFormat {
    Csv,
    Json,
}

/// CLI failure with its process exit code.
enum CliError {
    /// Bad flags or parameters (exit 2).
    Usage(String),
    /// Numerical or I/O failure during an otherwise valid run (exit 3).
    Runtime(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl From<wishart_smin::Error> for CliError {
    fn from(e: wishart_smin::Error) -> Self {
        use wishart_smin::Error::*;
        match e {
            InvalidParams(_) | Parse(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("i/o: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Density(args) => commands::density(args),
        Command::FtDensity(args) => commands::ft_density(args),
        Command::Moments(args) => commands::moments(args),
        Command::Marginal(args) => commands::marginal(args),
        Command::Mc(args) => commands::mc(args),
        Command::Tw(args) => commands::tw(args),
        Command::Kicked(args) => commands::kicked(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
