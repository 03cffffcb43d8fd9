use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracpow_core::experiment::MatrixSpec;
use fracpow_core::Family;

#[derive(Debug, Parser)]
#[command(name = "fracpow", version, about = "Certified computation of A^alpha b for Hermitian positive definite A")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute A^alpha b and report the per-node certificate.
    Compute(ComputeArgs),
    /// Emit the residual threshold of every quadrature node.
    Thresholds(RunArgs),
    /// Trace CG error against the residual bound for a list of shifts.
    BoundTrace(TraceArgs),
    /// Run the reference comparison grid.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Gj1,
    Gj2,
    De,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Gj1 => Family::Gj1,
            FamilyArg::Gj2 => Family::Gj2,
            FamilyArg::De => Family::De,
        }
    }
}

fn parse_matrix(s: &str) -> Result<MatrixSpec, String> {
    s.parse().map_err(|e: fracpow_core::Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// lap1d:<n>, lap2d:<nx>x<ny>, mm:<path> or diag:<v1,v2,...>
    #[arg(long, value_parser = parse_matrix)]
    pub matrix: MatrixSpec,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, value_enum, default_value = "de")]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 0.5)]
    pub quad_share: f64,
    #[arg(long, default_value_t = 0.5)]
    pub solve_share: f64,
    /// Right-hand side, one value per line (`re im` for complex). Defaults to ones.
    #[arg(long)]
    pub rhs: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized fixtures (Lanczos start vector).
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Cap on joint CG iterations (default 10 n).
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    #[arg(long, value_parser = parse_matrix)]
    pub matrix: MatrixSpec,
    #[arg(long, value_delimiter = ',', default_value = "0.1,1,10,100")]
    pub shifts: Vec<f64>,
    #[arg(long)]
    pub rhs: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Per-shift iteration cap (default 2 n).
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Repeat for several matrices; defaults to lap1d:1000 and lap2d:32x32.
    #[arg(long = "matrix", value_parser = parse_matrix)]
    pub matrices: Vec<MatrixSpec>,
    #[arg(long = "alpha", value_delimiter = ',', default_value = "0.2,0.5")]
    pub alphas: Vec<f64>,
    #[arg(long = "eps", value_delimiter = ',', default_value = "1e-3,1e-6,1e-9")]
    pub epsilons: Vec<f64>,
    #[arg(long = "family", value_enum, value_delimiter = ',', default_value = "gj1,gj2,de")]
    pub families: Vec<FamilyArg>,
    #[arg(long, default_value_t = 0.5)]
    pub quad_share: f64,
    #[arg(long, default_value_t = 0.5)]
    pub solve_share: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for grid cells.
    #[arg(long)]
    pub jobs: Option<usize>,
}
