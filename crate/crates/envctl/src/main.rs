use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use envctl::commands::{cmd_bayes, cmd_capacity, cmd_check, cmd_envelope, Kind};
use envctl::modelfile::load_path;

/// Exact envelopes of conditional probability extensions.
#[derive(Parser)]
#[command(name = "envctl", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a model file and decide coherence of its pinned entries.
    Check {
        file: PathBuf,
        /// Print an agreeing layered witness when coherent.
        #[arg(long)]
        witness: bool,
        #[arg(long)]
        json: bool,
    },
    /// Compute lower/upper envelopes for the file's queries.
    Envelope {
        file: PathBuf,
        /// Extension class: coherent, dis, fully-dis, sc, or fsc.
        #[arg(long, default_value = "coherent")]
        kind: String,
        /// Cross-check each finite query against the exact LP oracle.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        json: bool,
    },
    /// Posterior bounds for a binomial parameter on a uniform grid.
    Bayes {
        /// Number of grid steps (cells are j/grid for j = 0..=grid).
        #[arg(long)]
        grid: usize,
        /// Number of observed trials, all successes.
        #[arg(long)]
        n: usize,
        /// Lower endpoint of the open-left interval, as p/q.
        #[arg(long)]
        theta1: String,
        /// Upper endpoint of the closed-right interval, as p/q.
        #[arg(long)]
        theta2: String,
        #[arg(long)]
        json: bool,
    },
    /// Analyze a capacity: Mobius masses, monotonicity, core, Choquet.
    Capacity {
        file: PathBuf,
        /// Accepted for compatibility; analysis always runs.
        #[arg(long)]
        analyze: bool,
        #[arg(long)]
        json: bool,
    },
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Check { file, witness, json } => {
            let loaded = load_path(&file)?;
            cmd_check(&loaded, witness, json)
        }
        Cmd::Envelope { file, kind, oracle, json } => {
            let loaded = load_path(&file)?;
            let kind = Kind::parse(&kind)?;
            cmd_envelope(&loaded, kind, oracle, json)
        }
        Cmd::Bayes { grid, n, theta1, theta2, json } => cmd_bayes(grid, n, &theta1, &theta2, json),
        Cmd::Capacity { file, analyze: _, json } => {
            let loaded = load_path(&file)?;
            cmd_capacity(&loaded, json)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
