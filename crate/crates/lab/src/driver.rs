//! Parallel map over sample indices.
//!
//! Sample `i` always draws from its own stream, so results do not depend on
//! how many workers run or how the work is split between them. Results come
//! back in index order.

use rayon::prelude::*;
use rayon::ThreadPool;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "WSF_LAB_WORKERS";

pub struct Driver {
    pool: ThreadPool,
}

impl Driver {
    /// `workers = None` falls back to [`WORKERS_ENV`], then to the number of
    /// available cores.
    pub fn new(workers: Option<usize>) -> anyhow::Result<Self> {
        let workers = workers
            .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()))
            .unwrap_or(0);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()?;
        Ok(Driver { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// `f(state, i)` for `i in 0..n`, with one `init()` state per work split.
    pub fn map<S, T, E, I, F>(&self, n: usize, init: I, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, usize) -> Result<T, E> + Sync + Send,
    {
        self.pool.install(|| {
            (0..n)
                .into_par_iter()
                .map_init(init, |s, i| f(s, i))
                .collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wsf_core::RngStream;

    #[test]
    fn results_ignore_worker_count() {
        let run = |w| {
            Driver::new(Some(w))
                .unwrap()
                .map(
                    1000,
                    || (),
                    |_, i| Ok::<_, ()>(RngStream::new(3, i as u64).uniform()),
                )
                .unwrap()
        };
        assert_eq!(run(1), run(4));
    }
}
