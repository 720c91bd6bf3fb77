//! Synthetic power study: N(0.5, 2²) against N(0, 1).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;
use stodom_core::empirical::mix_seed;
use stodom_core::{BootstrapCache, EmpiricalDistribution, Order, TestMode};

use crate::error::CliError;

pub const DEFAULT_N_GRID: [usize; 5] = [100, 250, 500, 1000, 2000];
pub const MIN_TRIALS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationConfig {
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub bootstrap: usize,
    pub alpha: f64,
    /// Threshold of the absolute tests.
    pub tau: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            n_grid: DEFAULT_N_GRID.to_vec(),
            trials: 200,
            seed: 0,
            bootstrap: 1000,
            alpha: 0.05,
            tau: 0.45,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerRow {
    pub n: usize,
    pub test: String,
    pub tpr: f64,
}

fn tests(tau: f64) -> [(String, Order, TestMode); 4] {
    [
        ("R-FSD".into(), Order::First, TestMode::Relative),
        ("R-SSD".into(), Order::Second, TestMode::Relative),
        (format!("eps-FSD({tau})"), Order::First, TestMode::Absolute { eps0: tau }),
        (format!("eps-SSD({tau})"), Order::Second, TestMode::Absolute { eps0: tau }),
    ]
}

/// Draws one trial and reports, per test, whether the wider Gaussian was
/// declared dominant.
fn trial(n: usize, t: usize, cfg: &ValidationConfig) -> Result<[bool; 4], CliError> {
    let trial_seed = mix_seed(mix_seed(cfg.seed, n as u64), t as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    let wide = Normal::new(0.5, 2.0).expect("valid normal");
    let narrow = Normal::new(0.0, 1.0).expect("valid normal");
    let x: Vec<f64> = (0..n).map(|_| wide.sample(&mut rng)).collect();
    let y: Vec<f64> = (0..n).map(|_| narrow.sample(&mut rng)).collect();
    let dists = [EmpiricalDistribution::from_samples(&x)?, EmpiricalDistribution::from_samples(&y)?];
    let cache = BootstrapCache::build(&dists, cfg.bootstrap, mix_seed(trial_seed, 1), false)?;
    let mut out = [false; 4];
    for (slot, (_, order, mode)) in out.iter_mut().zip(tests(cfg.tau)) {
        *slot = cache.pairwise_tests(order, mode, cfg.alpha)?[1].reject_h0;
    }
    Ok(out)
}

pub fn validate_gaussian(cfg: &ValidationConfig) -> Result<Vec<PowerRow>, CliError> {
    if cfg.trials < MIN_TRIALS {
        return Err(CliError::Config(format!("at least {MIN_TRIALS} trials are required, got {}", cfg.trials)));
    }
    if cfg.n_grid.iter().any(|&n| n < 2) {
        return Err(CliError::Config("sample sizes must be at least 2".into()));
    }
    let names = tests(cfg.tau).map(|(name, ..)| name);
    let mut rows = Vec::new();
    for &n in &cfg.n_grid {
        let outcomes = (0..cfg.trials)
            .into_par_iter()
            .map(|t| trial(n, t, cfg))
            .collect::<Result<Vec<_>, _>>()?;
        for (idx, name) in names.iter().enumerate() {
            let hits = outcomes.iter().filter(|o| o[idx]).count();
            rows.push(PowerRow {
                n,
                test: name.clone(),
                tpr: hits as f64 / cfg.trials as f64,
            });
        }
    }
    Ok(rows)
}

pub fn power_csv(rows: &[PowerRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}
