//! Library side of the `ecdim` command-line tool.
//!
//! Each subcommand is a function that writes its result to a caller-supplied
//! writer and reports failure through [`CliError`], whose
//! [`exit_code`](CliError::exit_code) is what the binary returns. Keeping the
//! commands here lets the integration tests drive them without a subprocess.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
mod config;
mod error;
pub mod output;

pub use config::{Format, RunConfig};
pub use error::{CliError, ExitCode};

/// Environment variable capping the size of the worker pool.
pub const THREADS_ENV: &str = "ECDIM_THREADS";

/// Installs the global rayon pool when `ECDIM_THREADS` is set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    // A second initialisation (tests in one process) keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
