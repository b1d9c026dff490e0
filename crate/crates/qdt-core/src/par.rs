//! Data-parallel helpers. With the `parallel` feature (default) these fan
//! out on rayon; without it they degrade to plain sequential iteration.
//! Result order is by index either way, so outputs are identical.

/// Approximate flop count below which parallel dispatch is not worth it.
pub(crate) const PAR_FLOP_THRESHOLD: usize = 1 << 16;

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn flat_map_rows<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> Vec<U> + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().flat_map_iter(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn flat_map_rows<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> Vec<U>,
{
    (0..n).flat_map(f).collect()
}
