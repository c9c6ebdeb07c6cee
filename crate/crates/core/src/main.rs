use std::path::PathBuf;
use std::process::ExitCode;

use afl_market::harness::{emit_plots, parse_config, run_experiment, sweep};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "afl-market", version, about = "Auction-based data market for federated learning")]
struct Cli {
    /// Override the master seed of every config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a TOML config.
    Run { config: PathBuf },
    /// Run every *.toml config in a directory.
    Sweep { config_dir: PathBuf },
    /// Render charts from a run's artifacts directory.
    Plot { artifacts_dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> afl_market::Result<()> {
    match cli.command {
        Command::Run { config } => {
            let mut config = parse_config(&config)?;
            if let Some(seed) = cli.seed {
                config.master_seed = seed;
            }
            if let Some(out) = cli.out {
                config.output_dir = out;
            }
            print!("{}", config.to_toml_string());
            let artifacts = run_experiment(&config)?;
            for path in artifacts.write_to(&config.output_dir)? {
                println!("wrote {}", path.display());
            }
        }
        Command::Sweep { config_dir } => {
            let entries = sweep(&config_dir, cli.out.as_deref(), cli.seed)?;
            let mut failed = 0;
            for e in &entries {
                match &e.result {
                    Ok(()) => println!("ok   {} -> {}", e.config_path.display(), e.output_dir.display()),
                    Err(err) => {
                        failed += 1;
                        println!("FAIL {}: {err}", e.config_path.display());
                    }
                }
            }
            if failed > 0 {
                return Err(afl_market::Error::Config(format!("{failed} of {} configs failed", entries.len())));
            }
        }
        Command::Plot { artifacts_dir } => {
            let report = emit_plots(&artifacts_dir)?;
            for n in &report.notices {
                println!("note: {n}");
            }
            for f in &report.files {
                println!("wrote {}", f.display());
            }
        }
    }
    Ok(())
}
