//! Batch execution over independent work items.
//!
//! Every batch entry point in the crate takes an [`Exec`] and funnels its
//! independent tasks through [`map`]. With the `parallel` feature the
//! `Parallel` variant runs on a rayon pool; without it both variants run on
//! the calling thread, so results never depend on the feature set.

use crate::error::Result;

/// How a batch of independent tasks is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Data-parallel over a worker pool. `workers: None` uses the global pool.
    #[default]
    Parallel,
    /// Data-parallel on a dedicated pool with a fixed number of workers.
    Workers(usize),
}

impl Exec {
    pub fn from_workers(workers: Option<usize>) -> Self {
        match workers {
            Some(0) | None => Exec::Parallel,
            Some(1) => Exec::Sequential,
            Some(w) => Exec::Workers(w),
        }
    }
}

/// Maps `f` over `items`, preserving input order in the output.
pub fn map<T, R, F>(exec: Exec, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    match exec {
        Exec::Sequential => items.into_iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            items.into_par_iter().map(f).collect()
        }
        #[cfg(feature = "parallel")]
        Exec::Workers(w) => {
            use rayon::prelude::*;
            match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
                Ok(pool) => pool.install(|| items.into_par_iter().map(f).collect()),
                Err(_) => items.into_iter().map(f).collect(),
            }
        }
        #[cfg(not(feature = "parallel"))]
        Exec::Parallel | Exec::Workers(_) => items.into_iter().map(f).collect(),
    }
}

/// Like [`map`] for fallible tasks; the first error in input order wins.
pub fn try_map<T, R, F>(exec: Exec, items: Vec<T>, f: F) -> Result<Vec<R>>
where
    T: Send,
    R: Send,
    F: Fn(T) -> Result<R> + Send + Sync,
{
    map(exec, items, f).into_iter().collect()
}
