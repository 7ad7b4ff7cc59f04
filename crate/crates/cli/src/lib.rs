//! Command line front end for `latfree`. The binary is a thin wrapper around
//! [`run_cli`], which the tests call in process.

pub mod acceptance;
mod args;
mod commands;
pub mod report;

use std::ffi::OsString;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::{json, Value};

pub use args::{Cli, Command, Format, Method};
pub use commands::{parse_vector, parse_vectors, CliError};

/// What the process should print and return.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_cli<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> Outcome {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return failure(1, "--threads must be positive");
        }
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => return failure(2, &format!("cannot start worker threads: {e}")),
    };
    let start = Instant::now();
    let result = pool.install(|| commands::execute(cli));
    let (code, mut value) = match result {
        Ok(v) => (0, v),
        Err(CliError::Failed(v)) => (3, v),
        Err(CliError::Usage(m)) => return failure(1, &m),
        Err(CliError::Fault(m)) => return failure(2, &m),
    };
    if cli.timing {
        if let Value::Object(map) = &mut value {
            map.insert("timing".into(), json!({"wall_ms": start.elapsed().as_secs_f64() * 1e3}));
        }
    }
    let text = match cli.format {
        Format::Json => report::render_json(&value),
        Format::Table => report::render_table(&value),
    };
    match &cli.out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr: String::new() },
            Err(e) => failure(1, &format!("cannot write {}: {e}", path.display())),
        },
        None => Outcome { code, stdout: text, stderr: String::new() },
    }
}

fn failure(code: i32, message: &str) -> Outcome {
    Outcome { code, stdout: String::new(), stderr: format!("error: {message}\n") }
}
