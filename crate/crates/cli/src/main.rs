use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use conic_rescale::first_order::FoKind;
use conic_rescale::report::SolveOptions;

mod bench;
mod commands;

pub const EXIT_SOLVED: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_NO_CONVERGE: u8 = 2;
pub const EXIT_INVALID: u8 = 3;

#[derive(Parser)]
#[command(name = "conic", version, about = "Rescaled first-order solvers for Ax = 0, x > 0 and Aᵀy > 0")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the kernel problem Ax = 0, x > 0 or the image problem Aᵀy > 0
    Solve(SolveArgs),
    /// Write a generated instance
    Gen(GenArgs),
    /// Check a certificate file against an instance
    Certify(CertifyArgs),
    /// Decide Ax ≤ b for integral data through the homogenised kernel problem
    Lp(LpArgs),
    /// Solve a deterministic batch of generated instances and print CSV
    Bench(BenchArgs),
    /// Answer separation queries for {y : Aᵀy ≥ 0} over stdin/stdout
    #[command(hide = true)]
    OracleServe(OracleServeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Kernel,
    Image,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SupportKind {
    Full,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fo {
    Vonneumann,
    Dv,
    Perceptron,
}

impl From<Fo> for FoKind {
    fn from(f: Fo) -> Self {
        match f {
            Fo::Vonneumann => FoKind::VonNeumann,
            Fo::Dv => FoKind::Dv,
            Fo::Perceptron => FoKind::Perceptron,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Kernel,
    Image,
    Degenerate,
}

#[derive(Args, Clone, Debug)]
pub struct Limits {
    /// First-order method of the image solver
    #[arg(long, value_enum)]
    pub fo: Option<Fo>,
    /// Override ε = 1/(11m); larger values void the rescaling guarantees
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub max_rescalings: Option<u64>,
    /// Cap on first-order updates
    #[arg(long)]
    pub max_iters: Option<u64>,
}

impl Limits {
    pub fn options(&self, known_rho: Option<f64>) -> SolveOptions {
        SolveOptions {
            max_rescalings: self.max_rescalings,
            max_iterations: self.max_iters,
            epsilon: self.epsilon,
            known_rho,
            first_order: self.fo.map(FoKind::from).unwrap_or_default(),
        }
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long, value_enum, default_value = "kernel")]
    pub mode: Mode,
    #[arg(long, value_enum, default_value = "full")]
    pub support: SupportKind,
    /// Instance file ("-" for stdin)
    #[arg(long, required_unless_present = "oracle_cmd")]
    pub input: Option<PathBuf>,
    /// Shell command serving a separation oracle (image mode, full support)
    #[arg(long)]
    pub oracle_cmd: Option<String>,
    /// Dimension of the oracle's cone when no instance is given
    #[arg(long)]
    pub dim: Option<usize>,
    /// Known Goffin measure; enables the bound checks in the report
    #[arg(long, allow_hyphen_values = true)]
    pub known_rho: Option<f64>,
    /// Tolerance of the certificate self-check
    #[arg(long)]
    pub tol: Option<f64>,
    /// Also write the certificate file here
    #[arg(long)]
    pub cert_out: Option<PathBuf>,
    /// Report measured wall time instead of 0
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub limits: Limits,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    /// Target |ρ| for the kernel and image families
    #[arg(long, default_value_t = 0.05)]
    pub rho: f64,
    /// Size of S* for the degenerate family (default n/2)
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout when absent)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub cert: PathBuf,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct LpArgs {
    /// Instance file holding the m × (d+1) matrix [A | b]
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub limits: Limits,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Instances per mode
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "kernel,image")]
    pub modes: Vec<Mode>,
    #[arg(long, value_enum, default_value = "full")]
    pub support: SupportKind,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 0.05)]
    pub rho: f64,
    /// Worker threads (default: all cores)
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Fill wall_ms with measured times; the CSV is then no longer reproducible
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub limits: Limits,
}

#[derive(Args, Debug)]
pub struct OracleServeArgs {
    #[arg(long)]
    pub input: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CONIC_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_SOLVED });
        }
    };
    let result = match cli.command {
        Command::Solve(a) => commands::solve(&a),
        Command::Gen(a) => commands::gen(&a),
        Command::Certify(a) => commands::certify(&a),
        Command::Lp(a) => commands::lp(&a),
        Command::Bench(a) => bench::bench(&a),
        Command::OracleServe(a) => commands::oracle_serve(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
