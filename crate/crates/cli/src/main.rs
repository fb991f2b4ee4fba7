//! `codashrink`: batch transforms, shrinkage estimates, benchmark runs and
//! moment reports for count data on the simplex.
//!
//! Exit status: 0 on success, 2 for unreadable input or bad flags/config,
//! 3 when the input is well formed but the computation is undefined for it.

mod commands;
mod error;
mod input;
mod output;

use std::env;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{estimate, moments, simulate, transform};
use error::{CliError, CliResult};

const THREADS_ENV: &str = "CODASHRINK_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "codashrink",
    version,
    about = "Shrinkage estimation for relative count data"
)]
struct Cli {
    /// Worker threads; overrides CODASHRINK_THREADS. Defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Apply clr, alr or a power transform to every row.
    Transform(transform::TransformArgs),
    /// Estimate the composition behind every row of counts.
    Estimate(estimate::EstimateArgs),
    /// Run the estimator benchmark and write long-format MSE records.
    Simulate(simulate::SimulateArgs),
    /// Delta-method mean and variance of clr(q_hat), optionally against Monte Carlo.
    Moments(moments::MomentsArgs),
}

fn thread_count(flag: Option<usize>) -> CliResult<Option<usize>> {
    let n = match flag {
        Some(n) => Some(n),
        None => match env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| {
                CliError::input(format!(
                    "{THREADS_ENV} must be a positive integer, got `{v}`"
                ))
            })?),
            Err(_) => None,
        },
    };
    if n == Some(0) {
        return Err(CliError::input("thread count must be at least 1"));
    }
    Ok(n)
}

fn run(cli: Cli) -> CliResult<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(cli.threads)? {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::input(format!("cannot start thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Transform(a) => transform::run(a),
        Command::Estimate(a) => estimate::run(a),
        Command::Simulate(a) => simulate::run(a),
        Command::Moments(a) => moments::run(a),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("codashrink: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
