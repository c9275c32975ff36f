use rayon::ThreadPool;

use crate::error::CliError;

/// Caps the worker count; unset means one worker per core.
pub const THREADS_ENV: &str = "SLEEPMIS_THREADS";

pub fn pool() -> Result<ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))
}
