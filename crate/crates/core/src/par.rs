//! Data-parallel helpers with a sequential fallback.
//!
//! Every parallel loop in the crate funnels through these two shims.
//! With the `parallel` feature (on by default) a `parallel: true` call
//! dispatches to rayon's work-stealing pool; without the feature the
//! flag is ignored and everything runs on the calling thread. Results
//! are identical either way — `find_first_index` returns the least
//! matching index regardless of scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Apply `f` to every index in `0..n`, collecting results in order.
pub(crate) fn map_indexed<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..n).map(f).collect()
}

/// The least index in `0..n` satisfying `pred`.
pub(crate) fn find_first_index<F>(n: usize, parallel: bool, pred: F) -> Option<usize>
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..n).into_par_iter().find_first(|&i| pred(i));
    }
    let _ = parallel;
    (0..n).find(|&i| pred(i))
}
