//! Order-preserving map over independent work items, parallel when the
//! `parallel` feature is enabled and requested.
//!
//! Results are returned in input order either way, so callers produce the same
//! output regardless of thread count. Parallel work runs on the current rayon
//! pool; wrap calls in `ThreadPool::install` to bound the worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn map_items<T, U, F>(items: &[T], parallel: bool, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    if parallel {
        items.par_iter().map(f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_items<T, U, F>(items: &[T], _parallel: bool, f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Whether this build can run work in parallel.
pub const AVAILABLE: bool = cfg!(feature = "parallel");
