//! Data-parallel loop helpers. With the `parallel` feature these fan out over
//! rayon; without it they are plain sequential loops. Reductions always
//! combine per-index partial results in index order so results are
//! bit-identical regardless of thread count.

use ndarray::{Array2, ArrayViewMut1, Axis};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Calls `f(k, lane)` for every lane of `arr` running along `axis`, with a
/// per-worker scratch value created by `init`.
pub(crate) fn for_each_lane<T, S, I, F>(arr: &mut Array2<T>, axis: Axis, init: I, f: F)
where
    T: Send + Sync,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize, ArrayViewMut1<T>) + Sync + Send,
{
    // lanes along axis 0 are indexed by axis 1 and vice versa
    let outer = Axis(1 - axis.index());
    #[cfg(feature = "parallel")]
    {
        arr.axis_iter_mut(outer)
            .into_par_iter()
            .enumerate()
            .for_each_init(&init, |s, (k, lane)| f(s, k, lane));
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut s = init();
        for (k, lane) in arr.axis_iter_mut(outer).enumerate() {
            f(&mut s, k, lane);
        }
    }
}

/// Calls `f(i, row)` for every row `values[i, ..]`.
pub(crate) fn for_each_row<T, F>(arr: &mut Array2<T>, f: F)
where
    T: Send + Sync,
    F: Fn(usize, ArrayViewMut1<T>) + Sync + Send,
{
    for_each_lane(arr, Axis(1), || (), |_, i, row| f(i, row));
}

/// Evaluates `f` on `0..n` and returns the results in index order.
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Like [`for_each_lane`] but hands out groups of up to `size` adjacent lanes
/// as a 2D view whose `outer` axis indexes the lanes.
pub(crate) fn for_each_lane_chunk<T, S, I, F>(
    arr: &mut Array2<T>,
    axis: Axis,
    size: usize,
    init: I,
    f: F,
) where
    T: Send + Sync,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, ndarray::ArrayViewMut2<T>) + Sync + Send,
{
    let outer = Axis(1 - axis.index());
    #[cfg(feature = "parallel")]
    {
        arr.axis_chunks_iter_mut(outer, size)
            .into_par_iter()
            .for_each_init(&init, |s, chunk| f(s, chunk));
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut s = init();
        for chunk in arr.axis_chunks_iter_mut(outer, size) {
            f(&mut s, chunk);
        }
    }
}
