use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod settings;

#[derive(Parser, Debug)]
#[command(name = "nesta", version, about = "Smoothed first-order solvers for sparse recovery")]
struct Cli {
    /// Overrides every seed derived from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for `bench`.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "nesta-out")]
    out: PathBuf,
    /// Repeat for more detail.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one problem described by a config file.
    Solve { config: PathBuf },
    /// Run the multi-solver benchmark.
    Bench { config: PathBuf },
    /// Total-variation image reconstruction.
    TvDemo { config: Option<PathBuf> },
    /// Analysis versus synthesis with a DCT frame.
    AnalysisDemo { config: Option<PathBuf> },
    /// Operator, gradient and convergence checks.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = commands::Context {
        seed: cli.seed,
        jobs: cli.jobs.max(1),
        out: cli.out,
        verbose: cli.verbose,
    };
    let outcome = match &cli.command {
        Command::Solve { config } => commands::solve(&ctx, config),
        Command::Bench { config } => commands::bench(&ctx, config),
        Command::TvDemo { config } => commands::tv_demo(&ctx, config.as_deref()),
        Command::AnalysisDemo { config } => commands::analysis_demo(&ctx, config.as_deref()),
        Command::Selftest => commands::selftest(&ctx),
    };
    match outcome {
        Ok(commands::Status::Done) => ExitCode::SUCCESS,
        Ok(commands::Status::Unfinished) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
