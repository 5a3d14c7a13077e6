//! Execution strategy for data-parallel stages.
//!
//! With the default `parallel` feature the helpers fan work out over rayon;
//! without it they run sequentially with identical semantics. Results are
//! always assembled in input order, and fallible maps report the first
//! error by input position, so outputs are byte-identical across both
//! paths.

use crate::error::Result;

#[cfg(feature = "parallel")]
pub fn map_vec<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Send + Sync,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_vec<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Fallible map. The error returned is the one at the smallest input
/// index, independent of scheduling.
pub fn try_map_vec<T, U, F>(items: &[T], f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Send + Sync,
{
    let results = map_vec(items, f);
    let mut out = Vec::with_capacity(results.len());
    for r in results {
        out.push(r?);
    }
    Ok(out)
}

/// True iff the parallel execution path is compiled in.
pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn map_preserves_order() {
        let items: Vec<u64> = (0..1000).collect();
        let mapped = map_vec(&items, |x| x * 2);
        assert_eq!(mapped, (0..1000).map(|x| x * 2).collect::<Vec<_>>());
    }

    #[test]
    fn try_map_reports_first_error_by_position() {
        let items: Vec<u64> = (0..100).collect();
        let err = try_map_vec(&items, |&x| {
            if x >= 40 {
                Err(Error::InvalidConfig(format!("boom at {x}")))
            } else {
                Ok(x)
            }
        })
        .unwrap_err();
        assert!(err.to_string().contains("boom at 40"), "got {err}");
    }
}
