//! `dcclust` command-line front end.
//!
//! Exit codes: 0 success, 1 numerical or runtime failure, 2 configuration error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "dcclust",
    version,
    about = "Constrained (set) clustering with DCA and boosted DCA"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalOpts,
}

#[derive(Args, Clone, Debug, Default)]
pub struct GlobalOpts {
    /// Output directory (overrides `output.dir`)
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for benchmark rows (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Seed override for starting points, restarts or generated data
    #[arg(long, global = true, value_name = "S")]
    pub seed: Option<u64>,
    /// Check that written rows are in run order (they always are)
    #[arg(long, global = true)]
    pub deterministic_order: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and write its report
    Solve { config: PathBuf },
    /// Paired multi-start comparison of the selected algorithms
    Bench { config: PathBuf },
    /// Sweep dimensions and sizes of a synthetic template
    Scaling { config: PathBuf },
    /// Write a uniform random point set
    Generate { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Solve { config } => commands::solve(config, &cli.global),
        Command::Bench { config } => commands::bench(config, &cli.global),
        Command::Scaling { config } => commands::scaling(config, &cli.global),
        Command::Generate { config } => commands::generate(config, &cli.global),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}
