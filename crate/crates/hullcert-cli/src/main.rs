//! `hullcert`: certified convex-hull estimation from boundary samples.
//!
//! Subcommands: estimate-hull, sample-cover, bound, reach, solve-ocp,
//! experiment {sensitivity|ocp}. All runs are deterministic given
//! (config, seed). With `--out DIR` files are written and stdout stays
//! silent; without it, JSON results go to stdout.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::CliError;

#[derive(Parser)]
#[command(name = "hullcert", version, about = "Certified convex-hull estimation toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample or cover a boundary, push it through a map, hull the image,
    /// and attach the error certificate.
    EstimateHull(commands::EstimateHullArgs),
    /// Generate a boundary cover (deterministic or random) and write it.
    SampleCover(commands::SampleCoverArgs),
    /// Evaluate one closed-form error bound.
    Bound(commands::BoundArgs),
    /// Reachable-hull estimation for a built-in uncertain system.
    Reach(commands::ReachArgs),
    /// Solve the padded spacecraft trajectory program.
    SolveOcp(commands::SolveOcpArgs),
    /// Batch experiments.
    #[command(subcommand)]
    Experiment(commands::ExperimentCmd),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::EstimateHull(args) => commands::estimate_hull(args),
        Cmd::SampleCover(args) => commands::sample_cover(args),
        Cmd::Bound(args) => commands::bound(args),
        Cmd::Reach(args) => commands::reach(args),
        Cmd::SolveOcp(args) => commands::solve_ocp(args),
        Cmd::Experiment(which) => commands::experiment(which),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
