//! Execution policy for embarrassingly parallel loops.
//!
//! Every parallel loop in the crate goes through [`Exec::map`], which returns
//! results in index order. Reductions are then done sequentially over that
//! vector, so numeric output never depends on the worker count. Without the
//! `parallel` feature every policy runs sequentially.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exec {
    Sequential,
    /// Rayon global pool.
    #[default]
    Parallel,
    /// Dedicated rayon pool with a fixed number of workers.
    Threads(usize),
}

impl Exec {
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Exec::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            #[cfg(feature = "parallel")]
            Exec::Threads(workers) => {
                use rayon::prelude::*;
                match rayon::ThreadPoolBuilder::new()
                    .num_threads(workers.max(1))
                    .build()
                {
                    Ok(pool) => pool.install(|| (0..n).into_par_iter().map(f).collect()),
                    Err(_) => (0..n).map(f).collect(),
                }
            }
            #[cfg(not(feature = "parallel"))]
            _ => (0..n).map(f).collect(),
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && !matches!(self, Exec::Sequential)
    }
}
