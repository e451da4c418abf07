use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use bergman_cli::{run, Command, Invocation};

/// Bergman kernel expansion engine: normal forms, TYZ coefficients and oracles.
#[derive(Parser)]
#[command(name = "bergman", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for reports and manifest.json.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed for the random model, overriding the configured one.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let inv = Invocation { command: args.command, config: args.config, out: args.out, seed: args.seed, jobs: args.jobs };
    match run(&inv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bergman: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
