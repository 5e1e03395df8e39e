//! `nilweier` — construct and verify minimal surfaces in the Heisenberg
//! group Nil₃ from holomorphic loop-group potentials.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "nilweier",
    about = "Loop-group construction of minimal surfaces in Nil3",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a degree-one potential and report its symmetry data.
    Analyze {
        /// Job configuration file (sectioned key=value format).
        #[arg(long)]
        config: PathBuf,
        /// Directory for output artifacts.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Generate the surface mesh and sample table.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Verify generated artifacts against the geometric residual suite.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Directory holding the generated artifacts.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn init_threads() {
    if let Ok(v) = std::env::var("NILWEIER_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                // Ignore failure if a pool already exists (e.g. in tests).
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("warning: ignoring invalid NILWEIER_THREADS={v:?}");
            }
        }
    }
}

fn main() {
    init_threads();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze { config, out } => commands::cmd_analyze(config, out),
        Command::Generate { config, out } => commands::cmd_generate(config, out),
        Command::Verify { config, out } => commands::cmd_verify(config, out),
    };
    if let Err(f) = result {
        eprintln!("error: {:#}", f.error);
        std::process::exit(f.code);
    }
}
