//! Data-parallel helpers.
//!
//! With the `parallel` feature (on by default) the helpers fan out over the
//! rayon thread pool. Without it, or inside [`with_sequential`], they run on the
//! calling thread in index order. Both paths produce identical results: every
//! helper writes to a fixed output slot per input, so no reduction order
//! depends on scheduling.

use std::cell::Cell;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with the parallel helpers pinned to the current thread.
pub fn with_sequential<R>(f: impl FnOnce() -> R) -> R {
    let previous = FORCE_SEQUENTIAL.with(|c| c.replace(true));
    let out = f();
    FORCE_SEQUENTIAL.with(|c| c.set(previous));
    out
}

/// True when the helpers will actually use the thread pool.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.with(|c| c.get())
}

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Applies `f(chunk_index, chunk)` to consecutive chunks of `data`.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        data.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
        return;
    }
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

/// Fills `out[i] = f(i)`, splitting the index range into chunks of `chunk`.
pub fn fill_indexed<T, F>(out: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    for_each_chunk_mut(out, chunk, |ci, c| {
        let base = ci * chunk;
        for (k, slot) in c.iter_mut().enumerate() {
            *slot = f(base + k);
        }
    });
}
