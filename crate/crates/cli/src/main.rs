//! `statein` command-line front-end.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 domain or
//! evaluation error. Reports go to stdout or `--out`; diagnostics to stderr.

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;
use serde_json::Value;
use statein_core::exec::Execution;

use args::{CatalogCommand, Cli, Command, Format, InvariantCommand, Output, SymmetryCommand};
use commands::{CliError, Outcome};

#[derive(Serialize)]
struct Report<'a> {
    tool_version: &'static str,
    seed: u64,
    input: &'a Value,
    results: &'a Value,
    pass: bool,
}

fn render(outcome: &Outcome, output: &Output) -> Result<Vec<u8>, CliError> {
    match output.format {
        Format::Json => {
            let report = Report {
                tool_version: env!("CARGO_PKG_VERSION"),
                seed: output.seed,
                input: &outcome.input,
                results: &outcome.results,
                pass: outcome.pass,
            };
            let mut bytes = serde_json::to_vec_pretty(&report).expect("report serializes");
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Text => Ok(outcome.text.clone().into_bytes()),
        Format::Csv => outcome.csv.clone().ok_or_else(|| {
            CliError::Usage(
                "CSV output is only available for grids (convexity, curvature --grid)".into(),
            )
        }),
    }
}

fn emit(bytes: &[u8], output: &Output) -> Result<(), CliError> {
    match &output.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn dispatch(command: &Command, exec: Execution) -> (Result<Outcome, CliError>, &Output) {
    match command {
        Command::Parse(a) => (commands::parse_cmd(a), &a.output),
        Command::Curvature(a) => (commands::curvature_cmd(a, exec), &a.output),
        Command::Check(a) => (commands::check_cmd(a, exec), &a.output),
        Command::Convexity(a) => (commands::convexity_cmd(a, exec), &a.output),
        Command::Symmetry(SymmetryCommand::Verify(a)) => {
            (commands::symmetry_cmd(a, exec), &a.output)
        }
        Command::Invariant(InvariantCommand::Check(a)) => {
            (commands::invariant_cmd(a, exec), &a.output)
        }
        Command::Catalog(CatalogCommand::List(a)) => (commands::catalog_list(a), a),
        Command::Catalog(CatalogCommand::Verify(a)) => {
            (commands::catalog_verify(a, exec), &a.output)
        }
        Command::Catalog(CatalogCommand::Export(a)) => (commands::catalog_export(a), &a.output),
    }
}

fn run() -> Result<bool, CliError> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            e.print().ok();
            return if code == 0 {
                Ok(true)
            } else {
                Err(CliError::Usage(String::new()))
            };
        }
    };
    let (outcome, output) = dispatch(&cli.command, Execution::default());
    let outcome = outcome?;
    let bytes = render(&outcome, output)?;
    emit(&bytes, output)?;
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let msg = e.to_string();
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
