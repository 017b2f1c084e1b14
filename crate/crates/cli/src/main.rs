//! `josephson`: equilibrium gaps, junction steady states, parameter sweeps
//! and finite-lattice trajectories as CSV.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{EquilibriumArgs, EvolveArgs};
use config::{JunctionArgs, SweepArgs};

#[derive(Debug, Parser)]
#[command(
    name = "josephson",
    version,
    about = "Mean-field Josephson junction steady states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gap equation of a single plate.
    Equilibrium(EquilibriumArgs),
    /// Steady state and currents of one junction.
    Ness {
        #[command(flatten)]
        junction: JunctionArgs,
        /// CSV destination; standard output if absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Steady states along a one-parameter sweep.
    Sweep {
        #[command(flatten)]
        junction: JunctionArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Exact evolution of the product initial state on n x n plates.
    Evolve {
        #[command(flatten)]
        junction: JunctionArgs,
        #[command(flatten)]
        evolve: EvolveArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Equilibrium(args) => commands::equilibrium(args),
        Command::Ness { junction, output } => commands::ness(junction, output.as_deref()),
        Command::Sweep { junction, sweep } => commands::sweep(junction, sweep),
        Command::Evolve { junction, evolve } => commands::evolve(junction, evolve),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
