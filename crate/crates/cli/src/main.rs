mod cli;
mod commands;
mod error;
mod grid;
mod report;
mod state_spec;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use crate::cli::Cli;
use crate::error::CliError;
use crate::report::{Meta, RunReport};

const THREADS_VAR: &str = "CATFORGE_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let threads: usize = match raw.trim().parse() {
        Ok(t) if t > 0 => t,
        _ => return Err(CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got '{raw}'"))),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("{THREADS_VAR}: {e}")))
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    let start = Instant::now();
    let table = commands::run(&cli.command)?;
    let report = RunReport {
        meta: Meta {
            command: std::env::args().collect(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: start.elapsed().as_secs_f64(),
            columns: table.columns,
        },
        params: serde_json::to_value(&cli.command)?,
        rows: table.rows,
    };
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    if cli.json {
        report.write_json(&mut sink)?;
    } else {
        report.write_csv(&mut sink)?;
    }
    sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("catforge: error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
