//! Command-line harness around the `distcent` library.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use distcent::ErrorClass;

use crate::config::{Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "distcent", version, about = "Distributed centrality and PageRank simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Degree, closeness, betweenness and PageRank tables for an edge list
    Centrality {
        input: PathBuf,
        #[command(flatten)]
        opts: Overrides,
    },
    /// Randomized incremental PageRank on a static edge list
    Pagerank {
        input: PathBuf,
        #[command(flatten)]
        opts: Overrides,
    },
    /// PageRank on a `time src dst` snapshot sequence
    PagerankTemporal {
        input: PathBuf,
        #[command(flatten)]
        opts: Overrides,
    },
    /// Exact centralized results with a cross-check of the two PageRank solvers
    Oracle {
        input: PathBuf,
        #[command(flatten)]
        opts: Overrides,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Lib(distcent::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Lib(e) => match e.class() {
                ErrorClass::Input => 1,
                ErrorClass::Assumption => 2,
                ErrorClass::Consistency => 3,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<distcent::Error> for CliError {
    fn from(e: distcent::Error) -> Self {
        CliError::Lib(e)
    }
}

/// Parses `args` and runs the command. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Centrality { input, opts } => {
            commands::cmd_centrality(input, &RunConfig::resolve(opts)?)
        }
        Command::Pagerank { input, opts } => commands::cmd_pagerank(input, &RunConfig::resolve(opts)?),
        Command::PagerankTemporal { input, opts } => {
            commands::cmd_pagerank_temporal(input, &RunConfig::resolve(opts)?)
        }
        Command::Oracle { input, opts } => commands::cmd_oracle(input, &RunConfig::resolve(opts)?),
    }
}
