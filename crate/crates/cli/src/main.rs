//! `nlslab` command-line driver.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Context;
use config::RunConfig;
use error::CliError;

#[derive(Parser)]
#[command(name = "nlslab", version, about = "Ground states, thresholds and evolution for the focusing NLS with an inverse-power potential")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Seed for randomized families; overrides the config value.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suppress progress messages.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Compute a ground state and write its profile and diagnostics.
    Groundstate,
    /// Classify initial data into the invariant sets.
    Classify,
    /// Evolve initial data and write the monitor trace.
    Evolve,
    /// Compute the action thresholds n and r.
    Thresholds,
    /// Run the invariant suites.
    Verify,
    /// Evolve a list of scaled ground states in parallel.
    Sweep,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Usage("--config is required".into()))?;
    let cfg = RunConfig::load(path)?;
    commands::ensure_dir(&cli.out)?;
    let ctx = Context { seed: cli.seed.unwrap_or(cfg.seed), cfg, out: cli.out.clone(), quiet: cli.quiet };
    match cli.command {
        Command::Groundstate => commands::cmd_groundstate(&ctx),
        Command::Classify => commands::cmd_classify(&ctx),
        Command::Evolve => commands::cmd_evolve(&ctx),
        Command::Thresholds => commands::cmd_thresholds(&ctx),
        Command::Verify => commands::cmd_verify(&ctx),
        Command::Sweep => commands::cmd_sweep(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
