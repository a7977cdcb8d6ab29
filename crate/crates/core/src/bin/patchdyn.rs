use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use patchdyn::commands::{cmd_coeffs, cmd_eigen, cmd_report, cmd_selftest, cmd_simulate, cmd_sweep, Mutation};
use patchdyn::config::RunConfig;

#[derive(Parser)]
#[command(name = "patchdyn", version, about = "Gap-tooth patch dynamics on a lattice with periodic diffusivity")]
struct Cli {
    /// TOML configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set geometry.n=6`
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic coefficients and the reference eigenvalue
    Coeffs,
    /// Patch slow eigenvalue against the reference
    Eigen,
    /// Patch scheme against the full lattice
    Simulate,
    /// Buffer-width sweep and figure tables
    Sweep,
    /// Figure tables and summary from an existing sweep
    Report,
    /// Pass/fail matrix of oracle and invariant checks
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `none` or `c0-sign`
        #[arg(long, default_value = "none")]
        mutate: Mutation,
    },
}

fn run(cli: Cli) -> patchdyn::Result<String> {
    if let Command::Selftest { seed, mutate } = cli.command {
        return cmd_selftest(seed, mutate);
    }
    let cfg = match &cli.config {
        Some(p) => RunConfig::from_path(p, &cli.set)?,
        None => RunConfig::from_toml("", &cli.set)?,
    };
    match cli.command {
        Command::Coeffs => cmd_coeffs(&cfg),
        Command::Eigen => cmd_eigen(&cfg),
        Command::Simulate => cmd_simulate(&cfg),
        Command::Sweep => cmd_sweep(&cfg),
        Command::Report => cmd_report(&cfg),
        Command::Selftest { .. } => unreachable!(),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
