//! Front end for the `gammacoh` library: `compute`, `verify` and `predict`.
//!
//! Exit codes: 0 on success, 1 when a verification cell is a `MISMATCH`,
//! 2 on usage, configuration, cache or computation errors.

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use cache::PresentationStore;
pub use commands::{cmd_compute, cmd_predict, cmd_verify};
pub use config::{Cli, Format, RunConfig};
pub use error::CliError;
pub use report::{Cell, CellValue, Row, Status, Table, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match jobs {
        None => Ok(f()),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| CliError::Config(e.to_string())),
    }
}

/// Executes a validated configuration, returning the rendered output and
/// exit code.
pub fn execute(config: &RunConfig) -> Result<(String, i32), CliError> {
    let store = PresentationStore::new(config.cache_dir.clone());
    in_pool(config.jobs, || match &config.command {
        config::Command::Compute { .. } => {
            Ok((cmd_compute(config, &store)?.render(config.format)?, EXIT_OK))
        }
        config::Command::Predict { .. } => {
            Ok((cmd_predict(config)?.render(config.format)?, EXIT_OK))
        }
        config::Command::Verify { .. } => {
            let report = cmd_verify(config, store)?;
            let code = if report.passed() {
                EXIT_OK
            } else {
                EXIT_MISMATCH
            };
            Ok((report.render(config.format)?, code))
        }
    })?
}

/// Parses `args` (including the program name), runs, and writes to `out`
/// and `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = RunConfig::from_cli(&cli).and_then(|c| execute(&c));
    match result {
        Ok((text, code)) => {
            if let Err(e) = out.write_all(text.as_bytes()) {
                let _ = writeln!(err, "gammacoh: {e}");
                return EXIT_USAGE;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "gammacoh: {e}");
            e.exit_code()
        }
    }
}
