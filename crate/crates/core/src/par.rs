//! Trial fan-out.
//!
//! With the `parallel` feature (default) trials run on the rayon pool;
//! without it everything runs on the calling thread. Results always come
//! back in trial order, so downstream aggregation is deterministic either way.

/// Evaluate `f(0..n)` and collect the results in index order.
#[cfg(feature = "parallel")]
pub fn map_trials<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_trials<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_trials_seq(n, f)
}

/// Sequential reference path, always available (used by the benches).
pub fn map_trials_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Map over a slice, preserving order.
#[cfg(feature = "parallel")]
pub fn map_slice<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    items.iter().map(f).collect()
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let v = map_trials(1000, |i| i * i);
        assert_eq!(v, map_trials_seq(1000, |i| i * i));
        assert_eq!(map_slice(&[3, 1, 2], |x| x + 1), vec![4, 2, 3]);
    }
}
