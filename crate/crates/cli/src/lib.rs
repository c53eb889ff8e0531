//! Library surface of the partreg binary, exposed so the integration and
//! acceptance suites can drive ingestion, output and the subcommands
//! directly.

pub mod args;
pub mod commands;
pub mod fail;
pub mod ingest;
pub mod output;

use args::{Cli, Command};
use clap::Parser;

fn init_threads() {
    if let Ok(value) = std::env::var("PARTREG_THREADS") {
        match value.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("warning: could not apply PARTREG_THREADS={n}: {e}");
                }
            }
            _ => eprintln!("warning: ignoring invalid PARTREG_THREADS={value}"),
        }
    }
}

pub fn main_entry() {
    init_threads();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate(args) => commands::estimate::run(&args),
        Command::Simulate(args) => commands::simulate::run(&args),
        Command::Validate(args) => commands::validate::run(&args),
        Command::Inspect(args) => commands::inspect::run(&args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
