//! Thread-pool executors for scans and grid sweeps.

use ptdirichlet_core::shooting::{MissSample, ScanExecutor};
use ptdirichlet_core::sweep::{GridExecutor, PointResult};
use rayon::prelude::*;

/// Environment variable that overrides `--threads`.
pub const THREADS_ENV: &str = "PTDIRICHLET_THREADS";

/// Runs work items on the global rayon pool; output order matches input order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl ScanExecutor for Rayon {
    fn map(
        &self,
        energies: &[f64],
        f: &(dyn Fn(f64) -> ptdirichlet_core::Result<MissSample> + Sync),
    ) -> Vec<ptdirichlet_core::Result<MissSample>> {
        energies.par_iter().map(|&e| f(e)).collect()
    }
}

impl GridExecutor for Rayon {
    fn run(&self, count: usize, f: &(dyn Fn(usize) -> PointResult + Sync)) -> Vec<PointResult> {
        (0..count).into_par_iter().map(f).collect()
    }
}

/// Thread budget: the environment variable wins over the flag; `None` or 0
/// means machine parallelism.
pub fn thread_budget(flag: Option<usize>, env: Option<&str>) -> Result<Option<usize>, String> {
    let n = match env.map(str::trim).filter(|s| !s.is_empty()) {
        Some(s) => Some(s.parse::<usize>().map_err(|_| format!("{THREADS_ENV}={s:?} is not a thread count"))?),
        None => flag,
    };
    Ok(n.filter(|&n| n > 0))
}

/// Configures the global pool once; later calls are ignored.
pub fn init_pool(threads: Option<usize>) {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    if b.build_global().is_err() {
        log::debug!("thread pool already initialised");
    }
}
