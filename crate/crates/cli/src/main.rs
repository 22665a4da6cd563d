mod args;
mod cache;
mod commands;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde::Serialize;
use serde_json::Value;

use args::{Cli, Command};
use commands::{Env, Outcome};
use mrdlab_core::field::ContextDescriptor;
use mrdlab_core::Error;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
const ENVELOPE_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum Status {
    Ok,
    VerificationFailed,
    Error,
}

#[derive(Serialize)]
struct Envelope {
    schema_version: u32,
    artifact_version: &'static str,
    command: &'static str,
    config: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<ContextDescriptor>,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<u128>,
    payload: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::BudgetExceeded { .. } => 4,
        Error::Disagreement(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build_global();
    }
    let env = Env { cache_dir: cli.cache_dir.as_deref() };
    let start = Instant::now();
    let (name, config, result) = match &cli.command {
        Command::Field(a) => ("field", serde_json::to_value(a), commands::field(&env, a)),
        Command::Check(a) => ("check", serde_json::to_value(a), commands::check(&env, a)),
        Command::Equiv(a) => ("equiv", serde_json::to_value(a), commands::equiv(&env, a)),
        Command::Census(a) => ("census", serde_json::to_value(a), commands::census_cmd(&env, a)),
        Command::Geometry(a) => ("geometry", serde_json::to_value(a), commands::geometry(&env, a)),
        Command::Det(a) => ("det", serde_json::to_value(a), commands::det(&env, a)),
        Command::Verify(a) => ("verify", serde_json::to_value(a), commands::verify(&env, a)),
    };
    let timing_ms = cli.timing.then(|| start.elapsed().as_millis());
    let config = config.expect("arguments serialize");
    let (envelope, code) = match result {
        Ok(Outcome { field, payload, verified }) => {
            let status = if verified { Status::Ok } else { Status::VerificationFailed };
            let code = if verified { 0 } else { 3 };
            (Envelope { schema_version: ENVELOPE_SCHEMA_VERSION, artifact_version: ARTIFACT_VERSION, command: name, config, field, status, timing_ms, payload, error: None }, code)
        }
        Err(e) => {
            let code = exit_code_for(&e);
            (Envelope { schema_version: ENVELOPE_SCHEMA_VERSION, artifact_version: ARTIFACT_VERSION, command: name, config, field: None, status: Status::Error, timing_ms, payload: Value::Null, error: Some(e.to_string()) }, code)
        }
    };
    let text = serde_json::to_string_pretty(&envelope).expect("envelope serializes") + "\n";
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if let Some(err) = &envelope.error {
        eprintln!("error: {err}");
    }
    ExitCode::from(code)
}
