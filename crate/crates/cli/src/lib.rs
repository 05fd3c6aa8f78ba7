//! Command-line front end: `simulate`, `verify`, `sweep`, `converge`.
//!
//! Exit codes: 0 success, 1 bad configuration or I/O, 2 insufficient
//! truncation (or `converge` not converged), 3 invariant violated during a
//! run, 4 `verify` found an unresolved formula.

pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::commands::Outcome;
use crate::config::{Overrides, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] bec_squeeze::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use bec_squeeze::Error as E;
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Model(E::TruncationInsufficient { .. }) => 2,
            CliError::Model(E::InvariantViolation(_) | E::NoConvergence) => 3,
            CliError::Model(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bec-squeeze", version, about = "Squeezing transfer from light to an atom-laser beam")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Time series of observables from each selected source, as CSV
    Simulate(Overrides),
    /// Adjudicate the closed-form expressions against the oracle
    Verify(Overrides),
    /// Repeat `simulate` over values of one parameter
    Sweep(Overrides),
    /// Oracle convergence over increasing cutoffs (`--values`)
    Converge(Overrides),
}

/// Runs one parsed command, returning its outcome and where to write it.
pub fn execute(cmd: &Command) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let flags = match cmd {
        Command::Simulate(o) | Command::Verify(o) | Command::Sweep(o) | Command::Converge(o) => o,
    };
    let mut merged = flags.with_config_file()?;
    if let (Command::Converge(_), None) = (cmd, merged.n_max) {
        // the sweep brings its own cutoffs; the largest stands in for the scenario's
        let cutoffs = merged.values.as_deref().map(config::parse_list::<usize>).transpose()?;
        merged.n_max = cutoffs.and_then(|c| c.into_iter().max()).or(commands::DEFAULT_CUTOFFS.last().copied());
    }
    let outcome = match cmd {
        Command::Simulate(_) => commands::simulate(&RunConfig::resolve(&merged)?)?,
        Command::Verify(_) => commands::verify(&RunConfig::resolve(&merged)?)?,
        Command::Sweep(_) => commands::sweep(&merged)?,
        Command::Converge(_) => commands::converge(&RunConfig::resolve(&merged)?, &merged)?,
    };
    Ok((outcome, merged.out))
}

/// Writes the body (and any attachments) and returns the exit code.
pub fn deliver(outcome: &Outcome, out: Option<&Path>) -> Result<i32, CliError> {
    output::emit(out, &outcome.body)?;
    if let Some(path) = out {
        for (suffix, text) in &outcome.attachments {
            let mut name = path.as_os_str().to_owned();
            name.push(suffix);
            output::emit(Some(Path::new(&name)), text)?;
        }
    }
    if let Some(note) = &outcome.note {
        eprintln!("{note}");
    }
    Ok(outcome.code)
}

/// Parse, run and deliver; returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command).and_then(|(outcome, out)| deliver(&outcome, out.as_deref())) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
