//! `rarita-kit`: verification suite, symbol scan and flow experiments.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::{CliError, CliResult};

const THREADS_ENV: &str = "RARITA_KIT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "rarita-kit",
    version,
    about = "3/2-spinor algebra, moduli and lattice operator checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every named check and write `verify_report.json`.
    Verify(VerifyArgs),
    /// Sample the symbol of the 3/2-Fueter operator and write `symbol_scan.csv`.
    SymbolScan(ScanArgs),
    /// Run the gradient flow described by a TOML file.
    Flow(FlowArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// TOML file with any of: samples, tol_exact, tol_fd, seed, output_dir. Flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Samples for algebraic checks; geometric checks use a tenth.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub tol_exact: Option<f64>,
    #[arg(long)]
    pub tol_fd: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value = "rarita-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    /// Flow configuration (TOML).
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write a checkpoint every this many accepted steps.
    #[arg(long)]
    pub checkpoint_every: Option<usize>,
    /// Checkpoint directory (holding psi.bin and conn.bin) to continue from.
    #[arg(long)]
    pub resume: Option<PathBuf>,
}

fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "{THREADS_ENV}: expected a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("{THREADS_ENV}: {e}")))
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    match cli.command {
        Command::Verify(a) => commands::verify(a),
        Command::SymbolScan(a) => commands::symbol_scan(a),
        Command::Flow(a) => commands::flow(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(error::EXIT_CONFIG)
            } else {
                ExitCode::from(error::EXIT_OK)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(error::EXIT_OK),
        Err(e) => {
            eprintln!("rarita-kit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
