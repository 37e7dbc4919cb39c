//! Execution strategy for the data-parallel loops in the crate.
//!
//! Effect ranking, full-factorial enumeration and seed sweeps all map an
//! independent closure over an index range. With the `parallel` feature
//! (on by default) those maps run on the rayon global pool; without it, or
//! when [`Strategy::Sequential`] is requested explicitly, they run on the
//! calling thread. Results are always returned in index order, so both
//! strategies produce identical output.

/// How an indexed map is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    /// Falls back to sequential when the crate is built without `parallel`.
    Parallel,
}

impl Default for Strategy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Strategy::Parallel
        } else {
            Strategy::Sequential
        }
    }
}

impl Strategy {
    /// Evaluates `f(i)` for `i in 0..n` and collects the results in order.
    pub fn map_range<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Strategy::Sequential => (0..n).map(f).collect(),
            Strategy::Parallel => par_map_range(n, f),
        }
    }

    /// Like [`map_range`](Self::map_range) but short-circuits on the first error
    /// (by index order for the sequential path; any error for the parallel one).
    pub fn try_map_range<T, E, F>(self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        match self {
            Strategy::Sequential => (0..n).map(f).collect(),
            Strategy::Parallel => par_try_map_range(n, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn par_map_range<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map_range<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
fn par_try_map_range<T, E, F>(n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_try_map_range<T, E, F>(n: usize, f: F) -> Result<Vec<T>, E>
where
    F: Fn(usize) -> Result<T, E>,
{
    (0..n).map(f).collect()
}
