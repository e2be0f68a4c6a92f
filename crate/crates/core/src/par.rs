//! Data-parallel helpers.
//!
//! With the `parallel` feature the helpers fan work out over the rayon pool.
//! Without it, or after [`set_sequential(true)`](set_sequential), they run on
//! the calling thread. Results are identical either way: every helper either
//! preserves index order or combines partial results with an
//! order-independent merge supplied by the caller.

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Forces the sequential path at runtime even when rayon is compiled in.
pub fn set_sequential(on: bool) {
    FORCE_SEQUENTIAL.store(on, Ordering::Relaxed);
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::Relaxed)
}

/// Sizes the global rayon pool. A no-op without the `parallel` feature.
pub fn init_thread_pool(threads: usize) -> Result<(), String> {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| e.to_string())
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        Ok(())
    }
}

/// `(0..n).map(f).collect()`, in index order.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Folds `0..n` into per-worker accumulators and merges them with `reduce`.
///
/// `reduce` must be associative and commutative for the result to be
/// independent of how the range was split.
pub fn fold_reduce<A, I, F, R>(n: usize, identity: I, fold: F, reduce: R) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(A, usize) -> A + Sync + Send,
    R: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return (0..n)
            .into_par_iter()
            .fold(&identity, &fold)
            .reduce(&identity, &reduce);
    }
    let _ = &reduce;
    (0..n).fold(identity(), fold)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_keeps_order() {
        let v = map_range(1000, |i| i * 2);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 2 * i));
    }

    #[test]
    fn fold_reduce_matches_sequential_sum() {
        let total = fold_reduce(10_000, || 0u64, |acc, i| acc + i as u64, |a, b| a + b);
        assert_eq!(total, 10_000 * 9_999 / 2);
    }
}
