mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::run::{exit_code, Invocation};

#[derive(Debug, Parser)]
#[command(name = "greedylab", version, about = "Greedy-approximation experiments on quasi-Banach sequence spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment description (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV/JSON tables and manifest.json.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides every seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a quasi-norm.
    Norm,
    /// Build a partition or a DKK space and dump its tables.
    Construct,
    /// Run the thresholding greedy algorithm.
    Tga,
    /// Measure a greedy-approximation parameter.
    Params { name: String },
    /// Re-check a report or run the invariant suites.
    Verify,
    /// Run a reproduction suite.
    Reproduce { suite: String },
    /// Run any config, dispatching on its `op` field.
    Run,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (subcommand, positional) = match &cli.command {
        Command::Norm => ("norm", None),
        Command::Construct => ("construct", None),
        Command::Tga => ("tga", None),
        Command::Params { name } => ("params", Some(name.clone())),
        Command::Verify => ("verify", None),
        Command::Reproduce { suite } => ("reproduce", Some(suite.clone())),
        Command::Run => ("run", None),
    };
    let invocation = Invocation {
        subcommand,
        positional,
        config: cli.config,
        out: cli.out,
        seed: cli.seed,
        jobs: cli.jobs,
        budget: std::env::var("GREEDYLAB_BUDGET").ok(),
    };
    match run::execute(&invocation) {
        Ok(report) => {
            print!("{}", report.stdout);
            if report.failed {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
