//! Command-line front end: run an experiment config, compare two finished
//! runs, or validate a config without touching the filesystem.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use relfreq::experiment::{self, ExperimentConfig};

#[derive(Parser)]
#[command(name = "relfreq", version, about = "Steered relative-frequency experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment and write its CSV artifacts.
    Run {
        /// Path to the experiment config (TOML).
        config: PathBuf,
    },
    /// Compare the reports of two finished runs side by side.
    Compare {
        /// Config of the first run.
        config_a: PathBuf,
        /// Config of the second run.
        config_b: PathBuf,
    },
    /// Check a config end to end (parse, validate, build, membership
    /// pre-check) without writing anything.
    Validate {
        /// Path to the experiment config (TOML).
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> relfreq::Result<()> {
    match command {
        Command::Run { config } => {
            let artifacts = experiment::run(&config)?;
            print!("{}", experiment::summarize(&artifacts));
            Ok(())
        }
        Command::Compare { config_a, config_b } => {
            let rows = experiment::compare_reports(&config_a, &config_b)?;
            print!("{}", experiment::render(&rows));
            Ok(())
        }
        Command::Validate { config } => {
            let text = std::fs::read_to_string(&config)?;
            let parsed = ExperimentConfig::from_toml(&text)?;
            experiment::preflight(&parsed)?;
            println!("ok: {}", config.display());
            Ok(())
        }
    }
}
