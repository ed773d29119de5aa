//! Slice- and fiber-level loop drivers. With the `parallel` feature (the
//! default) these fan out over rayon's pool; otherwise they run the same
//! loops sequentially. Results are merged by index, so output does not
//! depend on the execution order either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Apply `f` to each `chunk_len`-sized chunk of `data` with its index.
pub(crate) fn for_each_chunk_mut<T, F>(data: &mut [T], chunk_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    if data.is_empty() {
        return;
    }
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(chunk_len)
            .enumerate()
            .for_each(|(k, chunk)| f(k, chunk));
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (k, chunk) in data.chunks_mut(chunk_len).enumerate() {
            f(k, chunk);
        }
    }
}

/// Map `f` over `0..count`, collecting results in index order.
pub(crate) fn map_collect<R, F>(count: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}
