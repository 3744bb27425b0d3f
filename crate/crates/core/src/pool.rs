//! Cached rayon pools keyed by worker count.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{Error, Result};

pub fn available_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn pool(nthreads: usize) -> Result<Arc<ThreadPool>> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS.get_or_init(Default::default).lock().unwrap();
    if let Some(p) = pools.get(&nthreads) {
        return Ok(Arc::clone(p));
    }
    let p = ThreadPoolBuilder::new()
        .num_threads(nthreads)
        .thread_name(move |i| format!("spgemm-{nthreads}-{i}"))
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start {nthreads} workers: {e}")))?;
    let p = Arc::new(p);
    pools.insert(nthreads, Arc::clone(&p));
    Ok(p)
}

/// Runs `f` inside a pool of exactly `nthreads` workers.
pub fn with_threads<T: Send>(nthreads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if nthreads == 0 {
        return Err(Error::Parameter("nthreads must be at least 1".into()));
    }
    Ok(pool(nthreads)?.install(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pool_has_requested_size() {
        assert_eq!(with_threads(3, rayon::current_num_threads).unwrap(), 3);
        assert_eq!(with_threads(1, rayon::current_num_threads).unwrap(), 1);
        assert!(with_threads(0, || ()).is_err());
    }
}
