//! Command-line front end: simulate correlation experiments, run
//! maximum-likelihood process tomography, validate or falsify a
//! tomographic hypothesis device-independently, characterize a channel
//! from bare correlations, and render boundary figures.

mod commands;
mod config;
mod fail;
mod svg;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use config::FileConfig;
use fail::Failure;

#[derive(Parser)]
#[command(name = "dichannel", version, about)]
struct Cli {
    /// Worker threads (fallback: DICHANNEL_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON config file supplying defaults (flags take precedence).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a counts file for a channel over a setting grid.
    Simulate(commands::SimulateArgs),
    /// Maximum-likelihood process tomography from a counts file.
    Qpt(commands::QptArgs),
    /// Device-independent validation of a tomographic hypothesis.
    Validate(commands::ValidateArgs),
    /// Device-independent characterization (minimal surviving hypothesis).
    Characterize(commands::CharacterizeArgs),
    /// Boundary polyline of a channel's correlation set.
    Boundary(commands::BoundaryArgs),
    /// Render result artifacts as summary tables.
    Report(commands::ReportArgs),
}

fn threads_from_env() -> Option<usize> {
    std::env::var("DICHANNEL_THREADS").ok()?.parse().ok()
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = FileConfig::load(cli.config.as_deref())?;
    if let Some(n) = cli.threads.or_else(threads_from_env).or(cfg.threads) {
        // a second invocation in-process would fail; the setting is global
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Simulate(args) => commands::simulate(args, &cfg),
        Command::Qpt(args) => commands::qpt(args, &cfg),
        Command::Validate(args) => commands::validate(args, &cfg),
        Command::Characterize(args) => commands::characterize(args, &cfg),
        Command::Boundary(args) => commands::boundary(args, &cfg),
        Command::Report(args) => commands::report(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
