//! One-dimensional empirical distributions.
//!
//! An [`EmpiricalDistribution`] holds a sorted copy of the samples together
//! with their prefix sums, so the CDF, the left-continuous quantile function
//! and the integrated quantile function `p -> ∫_0^p Q(t) dt` are all
//! evaluated exactly. The integrated quantile is piecewise linear with
//! breakpoints at `i / n`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Key of one deterministic bootstrap draw.
///
/// The same `(seed, iteration)` pair always produces the same uniform
/// stream, whichever thread evaluates it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BootstrapSeed {
    pub seed: u64,
    pub iteration: u64,
}

impl BootstrapSeed {
    pub fn new(seed: u64, iteration: u64) -> Self {
        Self { seed, iteration }
    }

    /// Seed for the `stream`-th independent consumer (typically a model index)
    /// of a run keyed by `seed`.
    pub fn for_stream(seed: u64, stream: u64, iteration: u64) -> Self {
        Self {
            seed: mix_seed(seed, stream),
            iteration,
        }
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.iteration);
        rng
    }
}

/// splitmix64 finaliser over `seed ^ golden * (stream + 1)`.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(stream.wrapping_add(1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform draw on (0, 1].
fn unit_open_closed(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

/// `ceil(p * n) - 1` clamped to `0..n`, snapping `p * n` to the nearest
/// integer when it is within rounding noise of one.
pub(crate) fn quantile_index(p: f64, n: usize) -> usize {
    let x = p * n as f64;
    let r = x.round();
    let k = if (x - r).abs() <= 8.0 * f64::EPSILON * x.max(1.0) {
        r
    } else {
        x.ceil()
    };
    (k as usize).clamp(1, n) - 1
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::DomainError {
            value: p,
            domain: "(0, 1]",
        })
    }
}

#[derive(Debug, Clone)]
pub struct EmpiricalDistribution {
    values: Vec<f64>,
    /// `prefix[i]` is the sum of the `i` smallest values.
    prefix: Vec<f64>,
    /// Position of each original sample in `values`; absent for resamples.
    ranks: Option<Arc<[u32]>>,
}

impl PartialEq for EmpiricalDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}

impl EmpiricalDistribution {
    pub fn from_samples(raw: &[f64]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some((index, &value)) = raw.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index, value });
        }
        let mut order: Vec<u32> = (0..raw.len() as u32).collect();
        order.sort_by(|&a, &b| raw[a as usize].total_cmp(&raw[b as usize]).then(a.cmp(&b)));
        let values: Vec<f64> = order.iter().map(|&i| raw[i as usize]).collect();
        let mut ranks = vec![0u32; raw.len()];
        for (pos, &i) in order.iter().enumerate() {
            ranks[i as usize] = pos as u32;
        }
        Ok(Self::from_sorted_unchecked(values, Some(ranks.into())))
    }

    fn from_sorted_unchecked(values: Vec<f64>, ranks: Option<Arc<[u32]>>) -> Self {
        let mut prefix = Vec::with_capacity(values.len() + 1);
        let mut acc = 0.0;
        prefix.push(acc);
        for &v in &values {
            acc += v;
            prefix.push(acc);
        }
        Self {
            values,
            prefix,
            ranks,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sorted samples.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn mean(&self) -> f64 {
        self.prefix[self.len()] / self.len() as f64
    }

    /// Largest absolute sample, used as the data scale.
    pub fn scale(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    /// Sum of the `i` smallest samples.
    pub(crate) fn prefix_sum(&self, i: usize) -> f64 {
        self.prefix[i]
    }

    /// Left-continuous quantile `inf { x : F(x) >= p }`.
    pub fn quantile_at(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        Ok(self.values[quantile_index(p, self.len())])
    }

    /// `∫_0^p Q(t) dt`, exact.
    pub fn integrated_quantile_at(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        let n = self.len();
        let nf = n as f64;
        let j = ((p * nf).floor() as usize).min(n);
        if j == n {
            return Ok(self.prefix[n] / nf);
        }
        Ok(self.prefix[j] / nf + (p - j as f64 / nf) * self.values[j])
    }

    /// Right-continuous empirical CDF `#{v <= x} / n`.
    pub fn cdf_at(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    /// Inverse-transform resample of `m` draws keyed by `seed`.
    pub fn resample(&self, m: usize, seed: BootstrapSeed) -> Result<Self> {
        if m == 0 {
            return Err(Error::DomainError {
                value: 0.0,
                domain: "resample size >= 1",
            });
        }
        let n = self.len();
        let mut rng = seed.rng();
        let mut counts = vec![0u32; n];
        for _ in 0..m {
            let u = unit_open_closed(&mut rng);
            counts[quantile_index(u, n)] += 1;
        }
        Ok(self.expand_counts(&counts, m))
    }

    /// Resample through a shared vector of original sample indices, so that
    /// several distributions observed on the same items stay paired.
    pub fn resample_indices(&self, indices: &[u32]) -> Result<Self> {
        let ranks = self.ranks.as_ref().ok_or(Error::MissingSampleOrder)?;
        let mut counts = vec![0u32; self.len()];
        for &i in indices {
            let rank = *ranks.get(i as usize).ok_or(Error::IndexOutOfRange {
                index: i as usize,
                len: ranks.len(),
            })?;
            counts[rank as usize] += 1;
        }
        Ok(self.expand_counts(&counts, indices.len()))
    }

    /// Values in their original (ingestion) order, when known.
    pub fn raw_order(&self) -> Option<Vec<f64>> {
        self.ranks
            .as_ref()
            .map(|r| r.iter().map(|&pos| self.values[pos as usize]).collect())
    }

    fn expand_counts(&self, counts: &[u32], m: usize) -> Self {
        let mut values = Vec::with_capacity(m);
        for (&c, &v) in counts.iter().zip(&self.values) {
            values.extend(std::iter::repeat_n(v, c as usize));
        }
        Self::from_sorted_unchecked(values, None)
    }
}

/// Index vector for one paired bootstrap iteration: `n` uniform draws from
/// `0..n` taken through the same inverse-transform map as [`EmpiricalDistribution::resample`].
pub fn paired_indices(n: usize, seed: BootstrapSeed) -> Vec<u32> {
    let mut rng = seed.rng();
    (0..n)
        .map(|_| quantile_index(unit_open_closed(&mut rng), n) as u32)
        .collect()
}

/// Right-continuous CDF of a pooled sample. Strictly positive on and above
/// the pool minimum.
pub fn pooled_cdf_at(pool: &EmpiricalDistribution, x: f64) -> f64 {
    pool.cdf_at(x)
}
