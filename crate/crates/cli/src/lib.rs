//! Command-line front end: polynomial ingestion, cached moment tables,
//! decomposition ladders, certificate suites and truncation sweeps.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on input,
//! configuration or stability errors.

use std::ffi::OsString;

use clap::Parser;

pub mod args;
pub mod cache;
mod commands;
pub mod error;
pub mod output;
pub mod polyjson;

use args::{Cli, Command};

pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match &cli.command {
        Command::Stability(a) => commands::stability(a),
        Command::Moments(a) => commands::moments(a),
        Command::Decompose(a) => commands::decompose_cmd(a),
        Command::Certify(a) => commands::certify(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
