//! Command implementations behind the `splatsim` binary.
//!
//! Every command is a plain function so that tests and other tools can drive
//! it without spawning a process.

pub mod args;
pub mod bench;
pub mod commands;

use std::fmt;

use sha2::{Digest, Sha256};

/// Failure of a command, carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;

impl From<splatsim::Error> for CliError {
    fn from(e: splatsim::Error) -> Self {
        let code = if e.is_io() { EXIT_IO } else { EXIT_VALIDATION };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_VALIDATION,
            message: msg.into(),
        }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        splatsim::Error::io(path, e).into()
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Runs `f` inside a dedicated pool of `threads` workers (0 = one per core).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::validation(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}
