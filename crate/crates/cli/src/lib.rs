//! Command-line front end for `trigbf`.
//!
//! Exit codes: 0 success, 1 usage or parameter error, 2 I/O or parse
//! error, 3 when `compare` finds the raised cosine less accurate than the
//! polynomial baseline.

pub mod args;
mod commands;
mod setup;

use std::ffi::OsString;
use std::fmt;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Check(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Check(m) => f.write_str(m),
        }
    }
}

impl From<trigbf::Error> for CliError {
    fn from(e: trigbf::Error) -> Self {
        match e {
            trigbf::Error::Parse { .. } => CliError::Io(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Parses `argv`, runs the subcommand and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let result = match cli.command {
        Command::Filter(a) => commands::filter(&a),
        Command::Compare(a) => commands::compare(&a),
        Command::Bench(a) => commands::bench(&a),
        Command::Kernel(a) => commands::kernel(&a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("trigbf: {e}");
            e.exit_code()
        }
    }
}
