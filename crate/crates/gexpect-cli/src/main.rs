//! `gexpect`: batch runner for sublinear-expectation experiments.
//!
//! Exit codes: 0 success, 2 configuration or schema error, 3 numerical
//! fault inside an engine, 4 hypothesis validation failed.

mod config;
mod runner;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "gexpect",
    version,
    about = "Run sublinear-expectation experiments from JSON configs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment config and write CSV plus a JSON report
    Run { config: PathBuf },
    /// Check the hypotheses declared by a validate config; exits 4 on failure
    Validate { config: PathBuf },
    /// Print the JSON schema for experiment configs
    Schema,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Engine(String),
    ValidationFailed,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Engine(_) => 3,
            CliError::ValidationFailed => 4,
        }
    }

    pub fn config(err: impl fmt::Display) -> Self {
        CliError::Config(err.to_string())
    }

    /// Errors surfacing while the engines run: numerical faults are the
    /// engine's own; everything else traces back to config values.
    pub fn from_engine(err: gexpect_core::Error) -> Self {
        match err {
            gexpect_core::Error::Numerical(msg) => CliError::Engine(msg),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Engine(msg) => write!(f, "numerical fault: {msg}"),
            CliError::ValidationFailed => write!(f, "hypothesis validation failed"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { config } => {
            let parsed = load_config(&config)?;
            let failed_validation = run_and_summarize(parsed, &config)?;
            if failed_validation {
                return Err(CliError::ValidationFailed);
            }
            Ok(())
        }
        Command::Validate { config } => {
            let parsed = load_config(&config)?;
            if !matches!(parsed.experiment, Experiment::Validate(_)) {
                return Err(CliError::Config(
                    "the validate subcommand needs a config with experiment = \"validate\"".into(),
                ));
            }
            let failed_validation = run_and_summarize(parsed, &config)?;
            if failed_validation {
                return Err(CliError::ValidationFailed);
            }
            Ok(())
        }
        Command::Schema => {
            println!("{}", include_str!("schema.json").trim_end());
            Ok(())
        }
    }
}

fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("cannot parse {}: {e}", path.display())))
}

/// Runs the experiment, prints a short summary, and reports whether a
/// validation experiment came back negative.
fn run_and_summarize(config: ExperimentConfig, path: &Path) -> Result<bool, CliError> {
    let tag = config.experiment.tag().to_string();
    let outcome = runner::run(config, path)?;
    println!(
        "{tag}: wrote {} and {}",
        outcome.csv_path.display(),
        outcome.report_path.display()
    );
    if let serde_json::Value::Object(map) = &outcome.report.results {
        for key in ["value", "center_value", "final_gap", "pass"] {
            if let Some(v) = map.get(key) {
                println!("  {key} = {v}");
            }
        }
    }
    let failed = outcome
        .report
        .validation
        .as_ref()
        .map(|v| !v.pass())
        .unwrap_or(false);
    Ok(failed)
}
