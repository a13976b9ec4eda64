//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) `Execution::Parallel` runs on the
//! rayon global pool; without it every call runs sequentially. Results never
//! depend on the execution mode: Monte Carlo work is cut into fixed-size
//! chunks, chunk `i` draws from `RngStream::new(seed).split(i)`, and chunk
//! results are merged in chunk order.

use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Trials per Monte Carlo chunk.
pub const CHUNK: usize = 1 << 14;

/// `items.iter().map(f).collect()`, in parallel when requested.
pub fn map<T, U, F>(exec: Execution, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// `(0..n).map(f).collect()`, in parallel when requested.
pub fn map_range<U, F>(exec: Execution, n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Runs `trials` independent trials. Each chunk starts from `init()`, feeds
/// every trial through `trial`, and the per-chunk accumulators are merged
/// left to right with `merge`.
pub fn monte_carlo<A, I, T, M>(
    exec: Execution,
    seed: u64,
    trials: usize,
    init: I,
    trial: T,
    merge: M,
) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    T: Fn(&mut RngStream, &mut A) + Sync + Send,
    M: Fn(A, A) -> A,
{
    let root = RngStream::new(seed);
    let chunks = trials.div_ceil(CHUNK);
    let parts = map_range(exec, chunks, |c| {
        let mut rng = root.split(c as u64);
        let mut acc = init();
        let len = CHUNK.min(trials - c * CHUNK);
        for _ in 0..len {
            trial(&mut rng, &mut acc);
        }
        acc
    });
    parts.into_iter().fold(init(), merge)
}

/// Configures the global rayon pool. No-op without the `parallel` feature.
pub fn set_threads(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        false
    }
}
