//! Data-parallel execution of independent work items.
//!
//! Every sweep in this crate is a map over an index range whose items do
//! not interact. Results are always returned in index order, so output is
//! identical whether the work ran on one thread or many.

/// How an index-parallel map is executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon work stealing on the current thread pool.
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Execution::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Evaluates `f(i)` for `i in 0..n` and returns the results in order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
        }
    }
}

/// Samples per random substream.
pub const SAMPLE_CHUNK: usize = 1024;

/// Draws `n` points uniform in `[0,1)^D` and maps each through `f`.
///
/// Sample `i` comes from substream `i / SAMPLE_CHUNK` of a ChaCha8 generator
/// seeded with `seed` (via `seed_from_u64`), at position `i % SAMPLE_CHUNK`
/// within that substream. The values therefore depend only on `seed` and
/// `i`, never on how chunks are scheduled.
pub fn map_uniform_samples<const D: usize, T, F>(exec: Execution, n: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn([f64; D]) -> T + Sync + Send,
{
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    let chunks = n.div_ceil(SAMPLE_CHUNK);
    let per_chunk = exec.map(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let len = SAMPLE_CHUNK.min(n - c * SAMPLE_CHUNK);
        (0..len)
            .map(|_| f(std::array::from_fn(|_| rng.gen::<f64>())))
            .collect::<Vec<T>>()
    });
    per_chunk.into_iter().flatten().collect()
}

/// Runs `job` on a pool with `threads` workers when the parallel backend is
/// compiled in; otherwise runs it directly.
pub fn with_threads<R: Send>(threads: Option<usize>, job: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        if let Some(n) = threads {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                return pool.install(job);
            }
        }
        job()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        job()
    }
}
