//! Command-line front end: argument types, reports, manifests and the
//! subcommands built on `chiral-core`.

// NaN must fail these comparisons, so the negated forms are intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod cmd;
pub mod error;
pub mod io;
pub mod manifest;
pub mod parse;
pub mod report;

use std::path::PathBuf;

use args::{Command, ReplayArgs};
use error::{CliError, CliResult, ExitCode};
use manifest::Manifest;

/// Environment variable fixing the worker thread count.
pub const THREADS_VAR: &str = "CHIRAL_THREADS";

pub fn run(command: &Command) -> CliResult<ExitCode> {
    match command {
        Command::Gen(a) => cmd::run_gen(a),
        Command::Verify(a) => cmd::run_verify(a),
        Command::Conserve(a) => cmd::run_conserve(a),
        Command::Reduce(a) => cmd::run_reduce(a),
        Command::Track(a) => cmd::run_track(a),
        Command::Heatmap(a) => cmd::run_heatmap(a),
        Command::Replay(a) => replay(a),
    }
}

/// Same command with its primary output redirected to `out`.
pub fn redirect(command: Command, out: PathBuf) -> Command {
    match command {
        Command::Gen(mut a) => {
            a.out = out;
            Command::Gen(a)
        }
        Command::Heatmap(mut a) => {
            a.out = out;
            Command::Heatmap(a)
        }
        Command::Verify(mut a) => {
            a.json = Some(out);
            Command::Verify(a)
        }
        Command::Conserve(mut a) => {
            a.json = Some(out);
            Command::Conserve(a)
        }
        Command::Reduce(mut a) => {
            a.json = Some(out);
            Command::Reduce(a)
        }
        Command::Track(mut a) => {
            a.json = Some(out);
            Command::Track(a)
        }
        Command::Replay(a) => Command::Replay(a),
    }
}

fn replay(args: &ReplayArgs) -> CliResult<ExitCode> {
    let m = Manifest::read(&args.manifest)?;
    if m.tool != env!("CARGO_PKG_NAME") {
        return Err(CliError::Manifest(format!(
            "written by '{}', not this tool",
            m.tool
        )));
    }
    if m.version != env!("CARGO_PKG_VERSION") {
        eprintln!(
            "warning: manifest written by version {}, replaying with {}",
            m.version,
            env!("CARGO_PKG_VERSION")
        );
    }
    let command = match &args.out {
        Some(out) => redirect(m.invocation, out.clone()),
        None => m.invocation,
    };
    run(&command)
}

/// Reads the thread count from the environment; unset means rayon's default.
pub fn thread_count() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_VAR) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Config(format!("{THREADS_VAR}: {e}"))),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "{THREADS_VAR} must be a positive integer, got '{v}'"
            ))),
        },
    }
}
