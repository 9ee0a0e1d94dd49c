//! Data-parallel sweep helpers. With the `parallel` feature (default) the
//! routed entry points fan out on rayon; sequential twins are always compiled
//! so the two code paths can be compared directly (see the criterion bench).
//!
//! Reductions are value-deterministic: min/max over finite floats and index-
//! ordered collects do not depend on the split.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn map_collect_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync + Send,
    T: Send,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_collect_par<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync + Send,
    T: Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Index-ordered map over 0..n, parallel when the feature is on.
pub fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync + Send,
    T: Send,
{
    #[cfg(feature = "parallel")]
    {
        map_collect_par(n, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_collect_seq(n, f)
    }
}

pub fn max_map_seq<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    (0..n).map(f).fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(feature = "parallel")]
pub fn max_map_par<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .map(f)
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

/// Max of f over 0..n, parallel when the feature is on.
pub fn max_map<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        max_map_par(n, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        max_map_seq(n, f)
    }
}

pub fn min_map_seq<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    (0..n).map(f).fold(f64::INFINITY, f64::min)
}

#[cfg(feature = "parallel")]
pub fn min_map_par<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .map(f)
        .reduce(|| f64::INFINITY, f64::min)
}

/// Min of f over 0..n, parallel when the feature is on.
pub fn min_map<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        min_map_par(n, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        min_map_seq(n, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routed_matches_sequential() {
        let f = |i: usize| ((i as f64) * 0.7).sin();
        assert_eq!(max_map(1000, f), max_map_seq(1000, f));
        assert_eq!(min_map(1000, f), min_map_seq(1000, f));
        assert_eq!(map_collect(100, |i| i * i), map_collect_seq(100, |i| i * i));
    }
}
