//! `spmac`: command-line front end for spmac-core.
//!
//! Exit codes: 0 on success, 2 on usage errors, 1 on numerical or I/O
//! failures. Errors are printed to stderr as one JSON object.

mod args;
mod commands;
mod output;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::RunConfig;
use crate::output::{emit, CliError};

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SPMAC_THREADS") else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("SPMAC_THREADS={v} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Io(e.to_string()))
}

fn run() -> Result<(), CliError> {
    let cfg = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit();
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string().trim().to_string())),
    };
    init_threads()?;
    let artifact = commands::run(&cfg)?;
    emit(&artifact, cfg.out.as_deref())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("{}", e.to_json());
        std::process::exit(e.exit_code());
    }
}
