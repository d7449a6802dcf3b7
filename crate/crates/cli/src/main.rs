//! `iotsense`: seeded experiments over the analytics library.
//!
//! Exit codes: 0 on success, 1 on usage or validation errors, 2 when a
//! solver stops without converging and `--strict` is set.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "iotsense", version, about = "Sensing-data analytics experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a seeded low-rank-plus-sparse traffic dataset to a directory.
    Generate(GenerateArgs),
    /// Singular value thresholding of a matrix.
    PcaDenoise(DenoiseArgs),
    /// Robust PCA on a fully observed matrix.
    Rpca(RecoveryArgs),
    /// Robust PCA restricted to observed entries.
    Complete(RecoveryArgs),
    /// Copula versus product-model likelihood-ratio detection experiment.
    Fuse(FuseArgs),
    /// Kernel ridge classification on circle-versus-annulus data.
    Kernel(KernelArgs),
    /// Consensus ADMM over seeded quadratic or least-squares agents.
    Consensus(ConsensusArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Seed for every random draw.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report path; the report goes to stdout when omitted.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    /// Exit with status 2 if the solver does not converge.
    #[arg(long)]
    strict: bool,
    /// CSV files carry a `c0,c1,…` header line.
    #[arg(long)]
    header: bool,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, default_value_t = 100)]
    rows: usize,
    #[arg(long, default_value_t = 100)]
    cols: usize,
    #[arg(long, default_value_t = 5)]
    rank: usize,
    #[arg(long, default_value_t = 0.05)]
    anomaly_frac: f64,
    #[arg(long, default_value_t = 10.0)]
    anomaly_scale: f64,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0.0)]
    missing_frac: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory, created if needed.
    #[arg(short = 'o', long = "output")]
    output: PathBuf,
    #[arg(long)]
    header: bool,
}

#[derive(Args, Debug)]
struct DenoiseArgs {
    /// Matrix CSV, or a directory holding `observed.csv`.
    #[arg(short = 'i', long = "input")]
    input: PathBuf,
    /// Threshold applied to the singular values.
    #[arg(long)]
    tau: f64,
    /// Also write the denoised matrix here.
    #[arg(long)]
    save_x: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SolverFlags {
    /// Weight of the sparse term; defaults to 1/sqrt(max(rows, cols)).
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    mu0: Option<f64>,
    #[arg(long, default_value_t = 1.5)]
    rho: f64,
    #[arg(long)]
    mu_max: Option<f64>,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
}

#[derive(Args, Debug)]
struct RecoveryArgs {
    /// Matrix CSV, or a directory written by `generate`.
    #[arg(short = 'i', long = "input")]
    input: PathBuf,
    /// Explicit 0/1 mask CSV; otherwise empty cells mark missing entries.
    #[arg(long)]
    mask: Option<PathBuf>,
    #[arg(long)]
    save_x: Option<PathBuf>,
    #[arg(long)]
    save_a: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverFlags,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct FuseArgs {
    #[arg(long, default_value_t = 0.8)]
    rho: f64,
    #[arg(long, default_value_t = 1.0)]
    shift0: f64,
    #[arg(long, default_value_t = 0.2)]
    shift1: f64,
    #[arg(long, default_value_t = 2000)]
    train: usize,
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KernelKind {
    Linear,
    Polynomial,
    Gaussian,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long, value_enum, default_value_t = KernelKind::Gaussian)]
    kernel: KernelKind,
    /// Gaussian bandwidth; the median pairwise distance when omitted.
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long, default_value_t = 2)]
    degree: u32,
    #[arg(long, default_value_t = 0.0)]
    offset: f64,
    #[arg(long, default_value_t = 1e-3)]
    ridge: f64,
    /// Points drawn per class.
    #[arg(long, default_value_t = 100)]
    per_class: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ObjectiveKind {
    Quadratic,
    LeastSquares,
}

#[derive(Args, Debug)]
struct ConsensusArgs {
    /// Edge list (`i j` per line); runs the decentralized variant. Without
    /// it a fusion center coordinates `--agents` agents.
    #[arg(long)]
    topology: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    agents: usize,
    #[arg(long, value_enum, default_value_t = ObjectiveKind::Quadratic)]
    objective: ObjectiveKind,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 1000)]
    max_rounds: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[command(flatten)]
    common: Common,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(commands::Status::Done) => ExitCode::SUCCESS,
        Ok(commands::Status::NotConverged) => {
            eprintln!("error: solver did not converge (--strict)");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
