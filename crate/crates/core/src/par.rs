//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) the entry points dispatch to
//! rayon; without it they call the sequential implementations in [`seq`].
//! Both paths produce bit-identical results: floating-point reductions are
//! chunked at a fixed size and the chunk partials are combined in slice
//! order, so the rounding sequence does not depend on thread scheduling or
//! on whether the feature is enabled. This is what makes repeated runs of
//! the pipeline byte-identical.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk size for deterministic reductions. Partial sums are always formed
/// per chunk and folded in order.
pub const CHUNK: usize = 8192;

/// Sum of `f(x)` over a slice, reduced deterministically.
pub fn sum_map<T, F>(items: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if items.len() > CHUNK {
            let partials: Vec<f64> = items
                .par_chunks(CHUNK)
                .map(|chunk| chunk.iter().map(&f).sum::<f64>())
                .collect();
            return partials.iter().sum();
        }
    }
    seq::sum_map(items, f)
}

/// Order-preserving map over a slice.
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        seq::map_slice(items, f)
    }
}

/// Order-preserving map over an index range.
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        seq::map_range(n, f)
    }
}

/// Count of elements satisfying a predicate.
pub fn count<T, F>(items: &[T], pred: F) -> usize
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().filter(|x| pred(x)).count()
    }
    #[cfg(not(feature = "parallel"))]
    {
        seq::count(items, pred)
    }
}

/// Sort a float buffer ascending by total order.
pub fn sort_floats(values: &mut [f64]) {
    #[cfg(feature = "parallel")]
    {
        values.par_sort_unstable_by(f64::total_cmp);
    }
    #[cfg(not(feature = "parallel"))]
    {
        seq::sort_floats(values);
    }
}

/// Sequential implementations, always available. The benchmark suite uses
/// these directly to compare against the parallel paths.
pub mod seq {
    use super::CHUNK;

    pub fn sum_map<T, F>(items: &[T], f: F) -> f64
    where
        F: Fn(&T) -> f64,
    {
        items
            .chunks(CHUNK)
            .map(|chunk| chunk.iter().map(&f).sum::<f64>())
            .sum()
    }

    pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
    where
        F: Fn(&T) -> U,
    {
        items.iter().map(f).collect()
    }

    pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
    where
        F: Fn(usize) -> U,
    {
        (0..n).map(f).collect()
    }

    pub fn count<T, F>(items: &[T], pred: F) -> usize
    where
        F: Fn(&T) -> bool,
    {
        items.iter().filter(|x| pred(x)).count()
    }

    pub fn sort_floats(values: &mut [f64]) {
        values.sort_unstable_by(f64::total_cmp);
    }
}
