//! Replica-level parallelism with an order-preserving merge, so serial and
//! parallel runs produce identical numbers.

use rayon::prelude::*;

use crate::error::HarnessError;

pub const THREADS_ENV: &str = "STRATOLEVY_THREADS";

pub struct Runner {
    pool: Option<rayon::ThreadPool>,
    serial: bool,
}

impl Runner {
    pub fn serial() -> Self {
        Self { pool: None, serial: true }
    }

    pub fn with_threads(threads: usize) -> Result<Self, HarnessError> {
        if threads == 0 {
            return Err(HarnessError::Config("thread count must be positive".into()));
        }
        if threads == 1 {
            return Ok(Self::serial());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| HarnessError::Config(format!("cannot start worker pool: {e}")))?;
        Ok(Self { pool: Some(pool), serial: false })
    }

    /// Uses `STRATOLEVY_THREADS` when set, all cores otherwise.
    pub fn from_env() -> Result<Self, HarnessError> {
        match std::env::var(THREADS_ENV) {
            Err(_) => Ok(Self { pool: None, serial: false }),
            Ok(v) => {
                let threads = v.trim().parse::<usize>().map_err(|_| {
                    HarnessError::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))
                })?;
                Self::with_threads(threads)
            }
        }
    }

    /// `[f(0), f(1), .., f(count-1)]` in index order.
    pub fn map<T, F>(&self, count: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        if self.serial {
            return (0..count).map(f).collect();
        }
        let run = || (0..count).into_par_iter().map(&f).collect();
        match &self.pool {
            Some(pool) => pool.install(run),
            None => run(),
        }
    }
}

/// Sample mean and standard error of the mean, summed in index order.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
