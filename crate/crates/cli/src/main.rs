//! `eapm`: data files for energy-restricted prepare-and-measure scenarios with
//! and without shared entanglement.

mod commands;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use table::Format;

#[derive(Parser, Debug)]
#[command(name = "eapm", version, about)]
struct Cli {
    /// Log solver progress (one JSON line per interior-point iteration) to stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Best two-input success probability against energy, per scheme.
    W2Curves {
        #[command(flatten)]
        grid: Grid,
        /// Columns to emit (repeatable or comma separated).
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Scheme::Qc, Scheme::Qubit, Scheme::Qutrit])]
        scheme: Vec<Scheme>,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        output: Output,
    },
    /// Extreme correlator E1 for each E0, with and without entanglement.
    CorrelatorRegion {
        #[arg(long, default_value_t = 0.2)]
        omega: f64,
        /// Number of evenly spaced E0 values in [-1, 1].
        #[arg(long, default_value_t = 41)]
        e0_points: usize,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        output: Output,
    },
    /// Entropy upper bounds from optimized eavesdropping attacks, with the
    /// observation fixed to the best value without entanglement.
    Attacks {
        /// Default energy grid.
        #[arg(long, value_enum, default_value_t = Panel::High)]
        panel: Panel,
        #[command(flatten)]
        grid: Grid,
        /// CSV with columns `omega,h_min` of externally computed lower bounds.
        #[arg(long)]
        classical_ref: Option<PathBuf>,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        output: Output,
    },
    /// Run the invariant checks; exits with 1 if any fails.
    Verify {
        /// Random samples per unitary no-go check.
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        /// Deliberately break a model to exercise the failure path.
        #[arg(long, value_enum)]
        inject_fault: Option<Fault>,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct Grid {
    #[arg(long)]
    omega_start: Option<f64>,
    #[arg(long)]
    omega_stop: Option<f64>,
    #[arg(long)]
    omega_step: Option<f64>,
}

#[derive(Args, Debug, Clone, Copy)]
struct Search {
    /// Local dimension of message and shared system for numerical searches.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Clone)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Scheme {
    Qc,
    Qubit,
    Qutrit,
    Seesaw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Panel {
    High,
    Low,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Fault {
    IncompleteChannel,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "debug" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
