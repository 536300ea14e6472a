//! Data-parallel execution of independent index-addressed work items.
//!
//! With the `parallel` feature (on by default) work is spread over the rayon
//! pool; without it, or with [`Execution::Sequential`], items run in order on
//! the calling thread. Results are always returned in index order, so output
//! never depends on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Defaults to `Parallel` when the feature is enabled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

/// Evaluates `f(0..n)` and collects the results in index order.
pub fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
    }
}

/// Like [`map_indexed`] but stops at the first error (in index order).
pub fn try_map_indexed<T, E, F>(exec: Execution, n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    match exec {
        Execution::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let seq = map_indexed(Execution::Sequential, 1000, |i| i * i);
        let def = map_indexed(Execution::default(), 1000, |i| i * i);
        assert_eq!(seq, def);
        assert_eq!(seq[31], 961);
    }

    #[test]
    fn first_error_wins() {
        let r: Result<Vec<usize>, usize> = try_map_indexed(Execution::default(), 100, |i| {
            if i % 7 == 6 {
                Err(i)
            } else {
                Ok(i)
            }
        });
        assert_eq!(r, Err(6));
    }
}
