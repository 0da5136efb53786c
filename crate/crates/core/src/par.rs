//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) these run on rayon; without it they
//! fall back to plain iterators. Results are deterministic either way: the
//! searching combinators return the first hit in slice order, never an
//! arbitrary one. The `*_seq` twins are always sequential and exist so the
//! two lanes can be compared directly (see the criterion benches).

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn find_map_first<T: Sync, R: Send>(
    items: &[T],
    f: impl Fn(&T) -> Option<R> + Sync + Send,
) -> Option<R> {
    #[cfg(feature = "parallel")]
    {
        items.par_iter().find_map_first(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().find_map(f)
    }
}

pub fn find_map_first_seq<T, R>(items: &[T], f: impl Fn(&T) -> Option<R>) -> Option<R> {
    items.iter().find_map(f)
}

pub fn all<T: Sync>(items: &[T], f: impl Fn(&T) -> bool + Sync + Send) -> bool {
    #[cfg(feature = "parallel")]
    {
        items.par_iter().all(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().all(f)
    }
}

pub fn all_seq<T>(items: &[T], f: impl Fn(&T) -> bool) -> bool {
    items.iter().all(f)
}

pub fn map_collect<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
