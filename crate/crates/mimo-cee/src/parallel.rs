//! Data-parallel driver for the Monte Carlo loops.
//!
//! Work items are indexed and own disjoint RNG streams, so results are
//! identical whatever the worker count; reductions always run in index
//! order. With the default `parallel` feature the map fans out over rayon;
//! without it the same code runs sequentially.

/// Maps `f` over `0..n`, preserving index order in the output.
#[cfg(feature = "parallel")]
pub fn indexed_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Maps `f` over `0..n`, preserving index order in the output.
#[cfg(not(feature = "parallel"))]
pub fn indexed_map<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Sequential reference version of [`indexed_map`], kept unconditionally so
/// benchmarks can compare both paths in one build.
pub fn indexed_map_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Runs `f` inside a rayon pool of `threads` workers (0 = rayon default).
/// Without the `parallel` feature the closure simply runs on this thread.
#[cfg(feature = "parallel")]
pub fn run_with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    if threads == 0 {
        return f();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("failed to build thread pool");
    pool.install(f)
}

#[cfg(not(feature = "parallel"))]
pub fn run_with_threads<T>(_threads: usize, f: impl FnOnce() -> T) -> T {
    f()
}
