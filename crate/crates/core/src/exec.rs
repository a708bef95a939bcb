// SPDX-License-Identifier: Apache-2.0

//! Sequential / rayon dispatch for the data-parallel kernels.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a data-parallel kernel runs.
///
/// `Parallel` falls back to the sequential path when the crate is built
/// without the `parallel` feature, so callers never need their own cfg gates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True if this execution actually fans out onto the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `(0..n).map(f).collect()`, in parallel when requested.
pub(crate) fn map_range<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Fills `out` in fixed-size rows: `f(row_index, row_slice)`.
pub(crate) fn for_each_row<T, F>(exec: Execution, out: &mut [T], width: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    if width == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        out.par_chunks_mut(width)
            .enumerate()
            .for_each(|(i, row)| f(i, row));
        return;
    }
    let _ = exec;
    out.chunks_mut(width)
        .enumerate()
        .for_each(|(i, row)| f(i, row));
}

/// Unstable sort, in parallel when requested. Callers supply a total order.
pub(crate) fn sort_unstable_by<T, F>(exec: Execution, v: &mut [T], cmp: F)
where
    T: Send,
    F: Fn(&T, &T) -> std::cmp::Ordering + Sync,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        v.par_sort_unstable_by(cmp);
        return;
    }
    let _ = exec;
    v.sort_unstable_by(cmp);
}

/// Runs `f` over each item, in parallel when requested, preserving output order.
pub(crate) fn map_slice<I, T, F>(exec: Execution, items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}
