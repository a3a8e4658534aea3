use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use inexact_newton_harness::{
    compare_exact_vs_sampled, exit, run_experiment, verify_bounds, ExperimentConfig, HarnessError,
};

/// Trust-region and cubic-regularization experiments with inexact Hessians.
#[derive(Parser, Debug)]
#[command(name = "inh", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the configured solver once and write its trace CSV.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `out`; without either the trace goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo check of the sample-size bounds over the `verify_eps` × `verify_delta` grid.
    VerifySampling {
        #[arg(long)]
        config: PathBuf,
    },
    /// Paired exact and sampled runs over `trials` seeds.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `trials` from the config.
        #[arg(long)]
        trials: Option<usize>,
    },
}

fn execute(cli: Cli) -> Result<u8, HarnessError> {
    match cli.command {
        Command::Solve { config, seed, out } => {
            let mut config = ExperimentConfig::load(&config)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            if out.is_some() {
                config.out = out;
            }
            let report = run_experiment(&config)?;
            if config.out.is_none() {
                print!("{}", report.trace_csv());
            } else {
                eprint!("{}", report.summary());
            }
            Ok(if report.converged() {
                exit::CONVERGED
            } else {
                exit::NOT_CONVERGED
            })
        }
        Command::VerifySampling { config } => {
            let report = verify_bounds(&ExperimentConfig::load(&config)?)?;
            print!("{}", report.table());
            Ok(if report.passed() {
                exit::CONVERGED
            } else {
                exit::VERIFICATION
            })
        }
        Command::Compare { config, trials } => {
            let config = ExperimentConfig::load(&config)?;
            let report = compare_exact_vs_sampled(&config, trials.unwrap_or(config.trials))?;
            print!("{}", report.table());
            Ok(if report.passed() {
                exit::CONVERGED
            } else {
                exit::VERIFICATION
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
