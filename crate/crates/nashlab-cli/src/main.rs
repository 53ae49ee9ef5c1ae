//! nashlab command line: generate games, solve them exactly, train learners,
//! evaluate policies, summarize experiments, and plot regret curves.
//!
//! Exit codes: 0 success, 1 validation error (bad flags or invalid inputs),
//! 2 runtime error. Data goes to files; diagnostics go to standard error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use commands::CliError;

#[derive(Parser)]
#[command(name = "nashlab", version, about = "Turn-based stochastic game laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random episodic game file.
    Gen {
        #[arg(long)]
        states: usize,
        #[arg(long)]
        a1: usize,
        #[arg(long)]
        a2: usize,
        /// Half horizon H; the episode has 2H steps.
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a game exactly and write the solution file.
    Solve {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Value-iteration tolerance (discounted games only; default 1e-10).
        #[arg(long)]
        tol: Option<f64>,
        /// Cross-check the episodic value against the brute-force enumeration oracle.
        #[arg(long)]
        verify: bool,
    },
    /// Train a learner and emit per-seed CSVs, an aggregate CSV, a summary
    /// JSON and a regret SVG into the output directory.
    Train {
        /// JSON experiment config; explicit flags win on conflict.
        #[arg(long)]
        config: Option<PathBuf>,
        /// nashq-episodic | nashq-discounted | lsvi-centralized | lsvi-independent
        #[arg(long)]
        alg: Option<String>,
        #[arg(long)]
        game: Option<PathBuf>,
        #[arg(long)]
        episodes: Option<u64>,
        #[arg(long)]
        steps: Option<u64>,
        /// Comma-separated seeds; ranges like 1..10 are inclusive.
        #[arg(long)]
        seeds: Option<String>,
        /// Episodic bonus multiplier c.
        #[arg(long)]
        c: Option<f64>,
        /// Discounted bonus constant c2.
        #[arg(long)]
        c2: Option<f64>,
        /// LSVI bonus multiplier.
        #[arg(long)]
        cbeta: Option<f64>,
        /// LSVI failure probability p.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        gap_lower_bound: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        cadence: Option<u64>,
        #[arg(long)]
        duality_cadence: Option<u64>,
        /// Independent setting: fixed:<a2> | seeded:<seed> | best-response
        #[arg(long)]
        opponent: Option<String>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Evaluate a policy pair on a game: value, duality gap, gap sum.
    Eval {
        #[arg(long)]
        game: PathBuf,
        /// Policy JSON: {"pi": ..., "mu": ...} (nested per step for episodic,
        /// flat per state for discounted).
        #[arg(long)]
        policy: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Summarize an experiment output directory in human-readable form.
    Report {
        /// Directory previously written by `train`.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a cumulative-regret SVG (linear and log panels) from a CSV.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => match err.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            _ => {
                eprint!("{err}");
                return ExitCode::from(1);
            }
        },
    };
    let result = match cli.command {
        Command::Gen { states, a1, a2, horizon, seed, out } => {
            commands::gen(states, a1, a2, horizon, seed, &out)
        }
        Command::Solve { game, out, tol, verify } => commands::solve(&game, &out, tol, verify),
        Command::Train {
            config,
            alg,
            game,
            episodes,
            steps,
            seeds,
            c,
            c2,
            cbeta,
            p,
            gap_lower_bound,
            tol,
            cadence,
            duality_cadence,
            opponent,
            out_dir,
        } => commands::train(commands::TrainArgs {
            config,
            alg,
            game,
            episodes,
            steps,
            seeds,
            c,
            c2,
            cbeta,
            p,
            gap_lower_bound,
            tol,
            cadence,
            duality_cadence,
            opponent,
            out_dir,
        }),
        Command::Eval { game, policy, out, tol } => commands::eval(&game, &policy, &out, tol),
        Command::Report { input, out } => commands::report(&input, out.as_deref()),
        Command::Plot { input, out } => commands::plot(&input, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
