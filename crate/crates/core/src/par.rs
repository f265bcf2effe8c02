//! Ordered map over independent work items, parallel when the `parallel`
//! feature is enabled and sequential otherwise.
//!
//! Results always come back in input order, so anything reduced or written
//! from them is identical across execution modes and thread counts.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    /// Parallel over items. `workers = None` uses the global rayon pool.
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run items concurrently.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `items.iter().map(f).collect()`, in order.
pub fn map_ordered<T, R, F>(exec: Execution, workers: Option<usize>, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        let go = || items.par_iter().map(&f).collect();
        return match workers {
            Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(go),
                Err(_) => go(),
            },
            None => go(),
        };
    }
    let _ = (exec, workers);
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..200).collect();
        let seq = map_ordered(Execution::Sequential, None, &items, |x| x * x);
        let par = map_ordered(Execution::Parallel, Some(3), &items, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq[199], 199 * 199);
    }
}
