use std::ops::Range;

use latlab_core::measure::{SampleExecutor, Tally};
use latlab_core::Result;
use rayon::prelude::*;

/// Samples per job. Fixed so that chunk boundaries do not depend on the
/// worker count.
pub const CHUNK: u64 = 1024;

/// Environment variable capping the worker count (0 or unset means one
/// worker per core).
pub const THREADS_ENV: &str = "LATLAB_THREADS";

/// Runs fixed-size sample chunks on a rayon pool and merges them in index
/// order.
pub struct RayonExecutor {
    pool: rayon::ThreadPool,
}

impl RayonExecutor {
    pub fn new(threads: usize) -> std::result::Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(Self { pool })
    }

    /// Reads [`THREADS_ENV`]; unparsable values fall back to automatic.
    pub fn from_env() -> std::result::Result<Self, rayon::ThreadPoolBuildError> {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .unwrap_or(0);
        Self::new(threads)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl SampleExecutor for RayonExecutor {
    fn run<T, F>(&self, n: u64, job: F) -> Result<T>
    where
        T: Tally,
        F: Fn(Range<u64>) -> Result<T> + Sync,
    {
        let ranges: Vec<Range<u64>> = (0..n.div_ceil(CHUNK))
            .map(|c| c * CHUNK..((c + 1) * CHUNK).min(n))
            .collect();
        let parts: Vec<Result<T>> = self.pool.install(|| ranges.into_par_iter().map(&job).collect());
        parts.into_iter().try_fold(T::empty(), |acc, part| Ok(acc.merge(part?)))
    }
}
