//! Dispatch between the rayon and sequential paths.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n` and collects in index order.
pub(crate) fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
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

/// Splits `items` into chunks, folds each chunk with `fold` starting from
/// `init()`, then reduces the partial results with `merge`. The merge must be
/// associative and commutative for the result to be independent of chunking.
pub(crate) fn fold_chunks<I, A, Init, Fold, Merge>(
    items: &[I],
    init: Init,
    fold: Fold,
    merge: Merge,
) -> A
where
    I: Sync,
    A: Send,
    Init: Fn() -> A + Send + Sync,
    Fold: Fn(A, &I) -> A + Send + Sync,
    Merge: Fn(A, A) -> A + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        let chunk = (items.len() / (rayon::current_num_threads() * 4)).max(1024);
        items
            .par_chunks(chunk)
            .map(|c| c.iter().fold(init(), &fold))
            .reduce(&init, &merge)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = &merge;
        items.iter().fold(init(), fold)
    }
}
