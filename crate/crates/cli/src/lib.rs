//! Command-line front end for hypercube scaling-limit experiments.

mod args;
mod config;
mod output;
mod run;

use std::ffi::OsString;
use std::time::Instant;

use clap::Parser;

pub use args::Cli;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] hsl_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Runs one subcommand. Returns 0 if every judged test passed, 1 if any failed,
/// 2 on usage, configuration or I/O errors.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match config::merge_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let out = cli.command.output().clone();
    let started = Instant::now();
    let result = match out.workers {
        Some(0) => Err(CliError::Usage("`--workers` must be positive".into())),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot build worker pool: {e}")))
            .and_then(|pool| pool.install(|| run::execute(&cli.command))),
        None => run::execute(&cli.command),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let runtime = (!out.no_timestamp).then(|| started.elapsed().as_secs_f64());
    if let Some(header) = &outcome.header {
        if let Err(e) = output::write_report(&out.out, header, &outcome.reports, runtime) {
            eprintln!("error: {e}");
            return 2;
        }
    }
    let mut failed = false;
    for r in &outcome.reports {
        let verdict = match r.pass() {
            Some(true) => "PASS",
            Some(false) => {
                failed = true;
                "FAIL"
            }
            None => "INFO",
        };
        match r.p_value {
            Some(p) => println!("{verdict} {}: statistic = {:.6e}, p = {:.4e}", r.name, r.statistic, p),
            None => println!("{verdict} {}: statistic = {:.6e}", r.name, r.statistic),
        }
    }
    i32::from(failed)
}
