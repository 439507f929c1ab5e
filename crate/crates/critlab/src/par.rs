//! Replica fan-out.
//!
//! Experiments are embarrassingly parallel over replicas: each replica owns a
//! seed from [`crate::rng::replica_seed`] and touches no shared state. With
//! the default `parallel` feature the map runs on the rayon pool; without it
//! the same call degrades to a sequential loop. [`map_replicas_serial`] is
//! always sequential and exists so benchmarks can compare both paths in one
//! build.

/// Maps `f` over replica indices `0..count`, collecting results in index order.
#[cfg(feature = "parallel")]
pub fn map_replicas<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

/// Maps `f` over replica indices `0..count`, collecting results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_replicas<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}

/// Sequential reference path, independent of the `parallel` feature.
pub fn map_replicas_serial<T, F>(count: u64, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..count).map(f).collect()
}
