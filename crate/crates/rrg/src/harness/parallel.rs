//! Replica pool. Worker count comes from `RRG_THREADS`, else all cores.

use std::sync::OnceLock;

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::rng::{replica_stream, StreamRng};

pub fn thread_count() -> usize {
    std::env::var("RRG_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn pool() -> &'static ThreadPool {
    static POOL: OnceLock<ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(thread_count())
            .build()
            .expect("thread pool")
    })
}

/// Run `f(replica, rng)` for every replica; results come back in replica order, so the
/// output does not depend on the worker count.
pub fn map_replicas<T, F>(seed: u64, replicas: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut StreamRng) -> T + Sync,
{
    pool().install(|| {
        (0..replicas as u64)
            .into_par_iter()
            .map(|r| f(r, &mut replica_stream(seed, r)))
            .collect()
    })
}
