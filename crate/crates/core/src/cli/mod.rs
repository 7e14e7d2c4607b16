//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a check suite failed, 2 usage, config or I/O error.

pub mod args;
pub mod check;
pub mod commands;

use std::io::Write;
use std::path::Path;

pub use args::Cli;
use args::{CheckArgs, Command, PhaseRegime};

use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn run_check(args: &CheckArgs) -> Result<i32> {
    let names = check::suite_names();
    if args.list {
        emit(&(names.join("\n") + "\n"), args.out.as_deref())?;
        return Ok(EXIT_OK);
    }
    if let Some(s) = &args.suite {
        if !names.contains(&s.as_str()) {
            return Err(Error::invalid("suite", format!("unknown suite `{s}`; try --list")));
        }
    }
    if let Some(t) = args.tolerance {
        if !(t >= 0.0) {
            return Err(Error::invalid("tolerance", "must be non-negative"));
        }
    }
    let samples = args.samples.unwrap_or(check::DEFAULT_MC_SAMPLES);
    let ctx = check::CheckContext::new(args.seed, samples)?;
    let report = check::run_checks(&ctx, args.suite.as_deref(), args.tolerance);
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Decode(e.to_string()))?;
    emit(&(json + "\n"), args.out.as_deref())?;
    if report.passed {
        Ok(EXIT_OK)
    } else {
        eprintln!("failing suites: {}", report.failing().join(", "));
        Ok(EXIT_CHECK_FAILED)
    }
}

fn run_inner(cli: &Cli) -> Result<i32> {
    let (result, common) = match &cli.command {
        Command::Phase { regime: PhaseRegime::Pulsed(a) } => (commands::cmd_phase_pulsed(a)?, &a.common),
        Command::Phase { regime: PhaseRegime::Continuous(a) } => (commands::cmd_phase_continuous(a)?, &a.common),
        Command::Visibility(a) => (commands::cmd_visibility(a)?, &a.common),
        Command::Check(a) => return run_check(a),
    };
    let format = commands::RunConfig::resolve(common)?.format;
    emit(&result.encode(format)?, common.out.as_deref())?;
    Ok(EXIT_OK)
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match run_inner(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
