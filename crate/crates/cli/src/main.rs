mod args;
mod commands;
mod config;
mod output;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};
use frontrun_core::Error;
use serde_json::{json, Value};

use args::{Cli, Command};

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(Error::DegenerateRegressor(_)) => 4,
            CliError::Core(Error::NoConvergence { .. }) => 5,
            CliError::Core(_) => 3,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }

    fn document(&self) -> Value {
        match self {
            CliError::Core(e) => {
                let mut doc = json!({"error": e.kind(), "message": e.to_string()});
                if let Error::NoConvergence { iterations, residual, tail } = e {
                    doc["iterations"] = json!(iterations);
                    doc["residual"] = json!(residual);
                    doc["tail"] = tail
                        .iter()
                        .map(|t| json!({"alpha": t[0], "beta": t[1], "lambda1": t[2], "mu1": t[3], "mu2": t[4]}))
                        .collect();
                }
                doc
            }
            CliError::Usage(msg) => json!({"error": "Usage", "message": msg}),
            CliError::Io(e) => json!({"error": "Io", "message": e.to_string()}),
        }
    }
}

fn command() -> clap::Command {
    Cli::command().mut_subcommands(|s| s.args_override_self(true).allow_negative_numbers(true))
}

fn parse() -> Result<Cli, CliError> {
    let cmd = command();
    let mut argv: Vec<String> = std::env::args().collect();
    if let Some(path) = std::env::var_os(config::CONFIG_ENV).filter(|p| !p.is_empty()) {
        argv = config::merge_config(&cmd, argv, &PathBuf::from(path)).map_err(|e| CliError::Usage(e.0))?;
    }
    let matches = match cmd.try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            std::process::exit(0);
        }
        Err(e) => return Err(CliError::Usage(e.to_string().trim_end().to_string())),
    };
    Cli::from_arg_matches(&matches).map_err(|e| CliError::Usage(e.to_string()))
}

fn run() -> Result<(), CliError> {
    let cli = parse()?;
    let mut out = output::sink(cli.out.as_deref())?;
    match &cli.command {
        Command::Solve(a) => commands::solve(a, &mut out)?,
        Command::Sweep(a) => commands::sweep(a, &mut out)?,
        Command::Classify(a) => commands::classify(a, &mut out)?,
        Command::Simulate(a) => commands::simulate(a, &mut out)?,
        Command::FixedPoint(a) => commands::fixed_point(a, &mut out)?,
        Command::PartialEquilibrium(a) => commands::partial_equilibrium(a, &mut out)?,
        Command::Limits(a) => commands::limits(a, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", output::to_json(&e.document()));
            ExitCode::from(e.exit_code())
        }
    }
}
