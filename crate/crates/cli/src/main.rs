mod common;
mod export;
mod fidelity;
mod sweep;
mod verify;

use clap::{Parser, Subcommand};

use common::Failure;

#[derive(Parser)]
#[command(name = "nsppt", version, about = "Optimal code fidelities for non-signalling and PPT-preserving codes")]
struct Cli {
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Pass threshold for numeric comparisons.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal fidelity of one instance.
    Fidelity(fidelity::Args),
    /// Exact fidelities over a rate schedule or a range of code sizes, as CSV.
    Sweep(sweep::Args),
    /// Run a named verification and print a JSON report.
    Verify(verify::Args),
    /// Write a code program in SDPA sparse format.
    Export(export::Args),
}

pub struct Globals {
    pub jobs: usize,
    pub seed: u64,
    pub tol: f64,
}

fn main() {
    let cli = Cli::parse();
    let globals = Globals { jobs: cli.jobs.max(1), seed: cli.seed, tol: cli.tol };
    let outcome = match cli.command {
        Command::Fidelity(a) => fidelity::run(a, &globals),
        Command::Sweep(a) => sweep::run(a, &globals),
        Command::Verify(a) => verify::run(a, &globals),
        Command::Export(a) => export::run(a, &globals),
    };
    if let Err(Failure { code, error }) = outcome {
        eprintln!("error: {error:#}");
        std::process::exit(code);
    }
}
