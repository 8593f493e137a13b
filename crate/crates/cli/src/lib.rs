//! File formats, reports and scenario runners behind the `wristsonar`
//! command line.
//!
//! Every artifact written here carries the schema version, the seed and a
//! SHA-256 of the resolved configuration, and re-running a command with the
//! same inputs reproduces its outputs byte for byte.

pub mod commands;
pub mod error;
pub mod output;
pub mod svg;
pub mod wav;

pub use error::{CliError, Result};
pub use output::{config_hash, load_config, OutDir, Provenance, SCHEMA_VERSION};

/// Runs `f` on a dedicated rayon pool; `threads == 0` picks the default.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
