//! `orbital-heat`: reproducible orbit-counting, heat-kernel and graph-walk experiments.

mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use error::CliError;

const THREADS_VAR: &str = "ORBITAL_HEAT_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("{THREADS_VAR} must be a positive integer (got {raw:?})")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Resource(format!("thread pool: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let outcome = commands::run(&cli.command, &cli.opts)?;
    let doc = output::document(&cli.command, &cli.opts, outcome.pass, outcome.result);
    if let Some(stem) = &cli.opts.out {
        output::write_outputs(stem, &doc, outcome.table.as_ref(), &outcome.extra)?;
    }
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("orbital-heat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
