//! Bootstrap significance tests for almost (absolute) and relative
//! stochastic dominance, and the multi-testing procedure that turns all
//! pairwise decisions into a Borda ranking.
//!
//! Decision rules, with `Φ⁻¹` the standard normal quantile:
//!
//! * absolute: reject `H0: ε > ε₀` when `ε̂ ≤ ε₀ + √((n+m)/(nm)) σ̂ Φ⁻¹(α)`
//! * relative: reject `H0: Δε_ij > 0` when `Δε̂_ij ≤ σ̂ Φ⁻¹(α) / √n`
//!
//! `σ̂` is the asymptotic standard deviation of the centred statistic, i.e.
//! the bootstrap standard deviation rescaled by the CLT rate
//! (`√(nm/(n+m))` or `√n`). With `α < 0.5` both thresholds sit below their
//! centre, so the tests are one-sided and conservative.
//!
//! Bootstrap draws are keyed by `(seed, model index, iteration)`, so every
//! result is reproducible regardless of how rayon schedules the work.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::dominance::{
    one_vs_all_into, pair_integrals, upper_pairs, Matrix, Order, PairIntegrals, PairwiseRatios,
};
use crate::empirical::{paired_indices, BootstrapSeed, EmpiricalDistribution};
use crate::error::{Error, Result};

/// Stream index reserved for the shared index vector of paired resampling.
const PAIRED_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TestMode {
    /// ε₀-dominance against a fixed threshold in (0, 0.5].
    Absolute { eps0: f64 },
    /// Threshold-free one-vs-all comparison.
    Relative,
}

impl TestMode {
    pub fn label(&self) -> &'static str {
        match self {
            TestMode::Absolute { .. } => "absolute",
            TestMode::Relative => "relative",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub order: Order,
    pub mode: TestMode,
    pub alpha: f64,
    pub bootstrap: usize,
    pub seed: u64,
    /// Resample one shared index vector per iteration across all models.
    pub paired: bool,
}

impl TestConfig {
    pub fn relative(order: Order) -> Self {
        Self {
            order,
            mode: TestMode::Relative,
            alpha: 0.05,
            bootstrap: 1000,
            seed: 0,
            paired: false,
        }
    }

    pub fn absolute(order: Order, eps0: f64) -> Self {
        Self {
            mode: TestMode::Absolute { eps0 },
            ..Self::relative(order)
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_bootstrap(mut self, bootstrap: usize) -> Self {
        self.bootstrap = bootstrap;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_paired(mut self, paired: bool) -> Self {
        self.paired = paired;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.bootstrap < 2 {
            return Err(Error::InvalidConfig(format!(
                "at least two bootstrap iterations are required, got {}",
                self.bootstrap
            )));
        }
        if let TestMode::Absolute { eps0 } = self.mode {
            if !(eps0 > 0.0 && eps0 <= 0.5) {
                return Err(Error::InvalidConfig(format!(
                    "eps0 must lie in (0, 0.5], got {eps0}"
                )));
            }
        }
        Ok(())
    }
}

/// `Φ⁻¹(p)`.
pub fn std_normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// `ε₀ + √((m+n)/(mn)) σ̂ Φ⁻¹(α)`.
pub fn absolute_threshold(eps0: f64, sigma_hat: f64, n: usize, m: usize, alpha: f64) -> f64 {
    let (n, m) = (n as f64, m as f64);
    eps0 + ((m + n) / (m * n)).sqrt() * sigma_hat * std_normal_quantile(alpha)
}

/// `σ̂ Φ⁻¹(α) / √n`.
pub fn relative_threshold(sigma_hat: f64, n: usize, alpha: f64) -> f64 {
    sigma_hat * std_normal_quantile(alpha) / (n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTestResult {
    /// `ε̂` (absolute) or `Δε̂` (relative) on the original samples.
    pub statistic: f64,
    /// Standard deviation of the statistic over bootstrap replicates.
    pub sigma_boot: f64,
    /// Asymptotic standard deviation entering the threshold.
    pub sigma_hat: f64,
    pub threshold: f64,
    pub reject_h0: bool,
    /// Level the decision was taken at.
    pub alpha: f64,
    pub confidence: f64,
    /// No decision possible: indistinguishable distributions or a
    /// self-comparison.
    pub degenerate: bool,
}

/// Standard deviation with divisor `len - 1`.
pub fn sample_std(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n - 1) as f64).sqrt()
}

fn check_equal_sizes(dists: &[EmpiricalDistribution]) -> Result<usize> {
    let n = dists[0].len();
    match dists.iter().find(|d| d.len() != n) {
        Some(d) => Err(Error::UnequalSampleSizes(n, d.len())),
        None => Ok(n),
    }
}

/// Bootstrap replicate `b` (1-based) of the given distributions, where
/// `streams[i]` is the model index that keys the draws of `dists[i]`.
fn resample_all(
    dists: &[&EmpiricalDistribution],
    streams: &[u64],
    seed: u64,
    paired: bool,
    b: u64,
) -> Result<Vec<EmpiricalDistribution>> {
    if paired {
        let idx = paired_indices(dists[0].len(), BootstrapSeed::for_stream(seed, PAIRED_STREAM, b));
        dists.iter().map(|d| d.resample_indices(&idx)).collect()
    } else {
        dists
            .iter()
            .zip(streams)
            .map(|(d, &s)| d.resample(d.len(), BootstrapSeed::for_stream(seed, s, b)))
            .collect()
    }
}

fn bootstrap_replicates<F>(
    dists: &[&EmpiricalDistribution],
    streams: &[u64],
    statistic: F,
    cfg: &TestConfig,
) -> Result<Vec<f64>>
where
    F: Fn(&[EmpiricalDistribution]) -> f64 + Sync,
{
    if cfg.paired {
        if let Some(d) = dists.iter().find(|d| d.len() != dists[0].len()) {
            return Err(Error::UnequalSampleSizes(dists[0].len(), d.len()));
        }
    }
    (1..=cfg.bootstrap as u64)
        .into_par_iter()
        .map(|b| resample_all(dists, streams, cfg.seed, cfg.paired, b).map(|r| statistic(&r)))
        .collect()
}

/// Bootstrap standard deviation (divisor `B - 1`) of `statistic`.
pub fn bootstrap_sigma<F>(dists: &[EmpiricalDistribution], statistic: F, cfg: &TestConfig) -> Result<f64>
where
    F: Fn(&[EmpiricalDistribution]) -> f64 + Sync,
{
    cfg.validate()?;
    if dists.is_empty() {
        return Err(Error::EmptyInput);
    }
    let refs: Vec<&EmpiricalDistribution> = dists.iter().collect();
    let streams: Vec<u64> = (0..dists.len() as u64).collect();
    Ok(sample_std(&bootstrap_replicates(&refs, &streams, statistic, cfg)?))
}

/// Absolute ε₀-test of "x dominates y" at level `cfg.alpha`.
pub fn absolute_test(
    x: &EmpiricalDistribution,
    y: &EmpiricalDistribution,
    cfg: &TestConfig,
) -> Result<PairwiseTestResult> {
    absolute_test_among(&[x.clone(), y.clone()], 0, 1, cfg)
}

/// Absolute test of model `i` over model `j`, drawing bootstrap replicates
/// from the same streams [`multi_test`] uses for those models.
pub fn absolute_test_among(
    dists: &[EmpiricalDistribution],
    i: usize,
    j: usize,
    cfg: &TestConfig,
) -> Result<PairwiseTestResult> {
    cfg.validate()?;
    let TestMode::Absolute { eps0 } = cfg.mode else {
        return Err(Error::InvalidConfig("absolute test requires an eps0 threshold".into()));
    };
    check_index(i, dists.len())?;
    check_index(j, dists.len())?;
    let order = cfg.order;
    let (x, y) = (&dists[i], &dists[j]);
    let original = pair_integrals(x, y).ratio(order);
    let reps = bootstrap_replicates(
        &[x, y],
        &[i as u64, j as u64],
        |r| pair_integrals(&r[0], &r[1]).ratio(order).value,
        cfg,
    )?;
    Ok(absolute_decision(
        original.value,
        original.degenerate || i == j,
        sample_std(&reps),
        eps0,
        x.len(),
        y.len(),
        cfg.alpha,
    ))
}

fn absolute_decision(
    statistic: f64,
    degenerate: bool,
    sigma_boot: f64,
    eps0: f64,
    n: usize,
    m: usize,
    alpha: f64,
) -> PairwiseTestResult {
    let (nf, mf) = (n as f64, m as f64);
    let sigma_hat = sigma_boot * (nf * mf / (nf + mf)).sqrt();
    let threshold = absolute_threshold(eps0, sigma_hat, n, m, alpha);
    PairwiseTestResult {
        statistic,
        sigma_boot,
        sigma_hat,
        threshold,
        reject_h0: !degenerate && statistic <= threshold,
        alpha,
        confidence: 1.0 - alpha,
        degenerate,
    }
}

fn relative_decision(statistic: f64, sigma_boot: f64, n: usize, alpha: f64, self_pair: bool) -> PairwiseTestResult {
    let sigma_hat = sigma_boot * (n as f64).sqrt();
    let threshold = relative_threshold(sigma_hat, n, alpha);
    // An exact zero difference with zero spread carries no direction.
    let degenerate = self_pair || (statistic == 0.0 && sigma_boot == 0.0);
    PairwiseTestResult {
        statistic,
        sigma_boot,
        sigma_hat,
        threshold,
        reject_h0: !degenerate && statistic <= threshold,
        alpha,
        confidence: 1.0 - alpha,
        degenerate,
    }
}

fn check_index(index: usize, len: usize) -> Result<()> {
    if index < len {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index, len })
    }
}

/// Relative test of model `i` over model `j` at level `cfg.alpha`.
pub fn relative_test(
    dists: &[EmpiricalDistribution],
    i: usize,
    j: usize,
    cfg: &TestConfig,
) -> Result<PairwiseTestResult> {
    cfg.validate()?;
    if cfg.mode != TestMode::Relative {
        return Err(Error::InvalidConfig("relative test called with an absolute configuration".into()));
    }
    check_index(i, dists.len())?;
    check_index(j, dists.len())?;
    let cache = BootstrapCache::build(dists, cfg.bootstrap, cfg.seed, cfg.paired)?;
    cache.relative_pair(cfg.order, i, j, cfg.alpha)
}

/// Cached violation-ratio integrals for the original samples (iteration 0)
/// and every bootstrap replicate `1..=B`, for all model pairs `i < j`.
#[derive(Debug, Clone)]
pub struct BootstrapCache {
    k: usize,
    sizes: Vec<usize>,
    bootstrap: usize,
    /// `integrals[b][p]` for upper-triangular pair `p`.
    integrals: Vec<Vec<PairIntegrals>>,
}

impl BootstrapCache {
    pub fn build(
        dists: &[EmpiricalDistribution],
        bootstrap: usize,
        seed: u64,
        paired: bool,
    ) -> Result<Self> {
        let k = dists.len();
        if k < 2 {
            return Err(Error::NeedAtLeastTwo(k));
        }
        if bootstrap < 2 {
            return Err(Error::InvalidConfig(format!(
                "at least two bootstrap iterations are required, got {bootstrap}"
            )));
        }
        if paired {
            check_equal_sizes(dists)?;
        }
        let pairs = upper_pairs(k);
        let refs: Vec<&EmpiricalDistribution> = dists.iter().collect();
        let streams: Vec<u64> = (0..k as u64).collect();
        let all_pairs = |ds: &[&EmpiricalDistribution]| -> Vec<PairIntegrals> {
            pairs.iter().map(|&(i, j)| pair_integrals(ds[i], ds[j])).collect()
        };
        let mut integrals = Vec::with_capacity(bootstrap + 1);
        integrals.push(all_pairs(&refs));
        let reps: Vec<Vec<PairIntegrals>> = (1..=bootstrap as u64)
            .into_par_iter()
            .map(|b| {
                let resampled = resample_all(&refs, &streams, seed, paired, b)?;
                let r: Vec<&EmpiricalDistribution> = resampled.iter().collect();
                Ok(all_pairs(&r))
            })
            .collect::<Result<_>>()?;
        integrals.extend(reps);
        Ok(Self {
            k,
            sizes: dists.iter().map(EmpiricalDistribution::len).collect(),
            bootstrap,
            integrals,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bootstrap(&self) -> usize {
        self.bootstrap
    }

    /// Ratios and distances on the original samples.
    pub fn original(&self) -> PairwiseRatios {
        PairwiseRatios::from_upper(self.k, &self.integrals[0])
    }

    fn eps_matrix(&self, b: usize, order: Order) -> Matrix {
        let mut m = Matrix::zeros(self.k);
        let mut p = 0;
        for i in 0..self.k {
            for j in (i + 1)..self.k {
                let pi = &self.integrals[b][p];
                p += 1;
                m.set(i, j, pi.ratio(order).value);
                m.set(j, i, pi.swapped().ratio(order).value);
            }
        }
        m
    }

    /// `ε_{b,i,j}` for every iteration, `b = 0` first.
    fn eps_by_iteration(&self, order: Order) -> Vec<Matrix> {
        (0..=self.bootstrap).map(|b| self.eps_matrix(b, order)).collect()
    }

    /// One-vs-all ratios for every iteration.
    fn one_vs_all_by_iteration(eps: &[Matrix]) -> Vec<Vec<f64>> {
        eps.iter()
            .map(|m| {
                let mut out = vec![0.0; m.k];
                one_vs_all_into(m, &mut out);
                out
            })
            .collect()
    }

    fn common_size(&self) -> Result<usize> {
        let n = self.sizes[0];
        match self.sizes.iter().find(|&&s| s != n) {
            Some(&s) => Err(Error::UnequalSampleSizes(n, s)),
            None => Ok(n),
        }
    }

    fn relative_pair(&self, order: Order, i: usize, j: usize, alpha: f64) -> Result<PairwiseTestResult> {
        let n = self.common_size()?;
        let ova = Self::one_vs_all_by_iteration(&self.eps_by_iteration(order));
        let reps: Vec<f64> = ova[1..].iter().map(|e| e[i] - e[j]).collect();
        Ok(relative_decision(ova[0][i] - ova[0][j], sample_std(&reps), n, alpha, i == j))
    }

    /// All pairwise decisions for one order and mode at the Bonferroni level
    /// `alpha / k²`, followed by Borda aggregation.
    pub fn decide(&self, order: Order, mode: TestMode, alpha: f64) -> Result<MultiTestResult> {
        let k = self.k;
        let corrected = alpha / (k * k) as f64;
        let (results, one_vs_all, original) = self.tests_at(order, mode, corrected)?;
        let wins = WinMatrix {
            k,
            wins: results.iter().map(|r| r.reject_h0).collect(),
            corrected_alpha: corrected,
        };
        let ranking = borda_rank(&wins, &one_vs_all, 1.0 - alpha)?;
        Ok(MultiTestResult {
            order,
            mode,
            alpha,
            wins,
            ranking,
            one_vs_all,
            ratios: original,
            tests: results,
        })
    }

    /// Row-major `k × k` pairwise decisions taken at `level` as given, with
    /// no multiplicity correction.
    pub fn pairwise_tests(&self, order: Order, mode: TestMode, level: f64) -> Result<Vec<PairwiseTestResult>> {
        Ok(self.tests_at(order, mode, level)?.0)
    }

    fn tests_at(
        &self,
        order: Order,
        mode: TestMode,
        level: f64,
    ) -> Result<(Vec<PairwiseTestResult>, Vec<f64>, PairwiseRatios)> {
        let k = self.k;
        let eps = self.eps_by_iteration(order);
        let ova = Self::one_vs_all_by_iteration(&eps);
        let original = self.original();
        let degenerate_pair = |i: usize, j: usize| {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            original.degenerate.contains(&(a, b))
        };
        let mut results = Vec::with_capacity(k * k);
        let mut reps = vec![0.0; self.bootstrap];
        let n = match mode {
            TestMode::Relative => Some(self.common_size()?),
            TestMode::Absolute { .. } => None,
        };
        for i in 0..k {
            for j in 0..k {
                let r = match mode {
                    TestMode::Relative => {
                        for (r, e) in reps.iter_mut().zip(&ova[1..]) {
                            *r = e[i] - e[j];
                        }
                        relative_decision(
                            ova[0][i] - ova[0][j],
                            sample_std(&reps),
                            n.unwrap_or_default(),
                            level,
                            i == j,
                        )
                    }
                    TestMode::Absolute { eps0 } => {
                        for (r, e) in reps.iter_mut().zip(&eps[1..]) {
                            *r = e.get(i, j);
                        }
                        absolute_decision(
                            eps[0].get(i, j),
                            i == j || degenerate_pair(i, j),
                            sample_std(&reps),
                            eps0,
                            self.sizes[i],
                            self.sizes[j],
                            level,
                        )
                    }
                };
                results.push(r);
            }
        }
        let one_vs_all = ova.into_iter().next().unwrap_or_default();
        Ok((results, one_vs_all, original))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinMatrix {
    pub k: usize,
    /// Row-major; `wins[i * k + j]` means model `i` beats model `j`.
    pub wins: Vec<bool>,
    pub corrected_alpha: f64,
}

impl WinMatrix {
    pub fn from_rows(rows: &[Vec<bool>], corrected_alpha: f64) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidConfig("win matrix must be square".into()));
        }
        Ok(Self {
            k,
            wins: rows.concat(),
            corrected_alpha,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.wins[i * self.k + j]
    }

    pub fn rows(&self) -> Vec<Vec<bool>> {
        self.wins.chunks(self.k).map(<[bool]>::to_vec).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    /// Model indices, best first.
    pub order: Vec<usize>,
    /// Per-model score the order was sorted by (win counts for Borda).
    pub scores: Vec<f64>,
    pub confidence: Option<f64>,
    /// Some adjacent models share a score.
    pub tied: bool,
}

impl Ranking {
    /// Sort by score descending, then `tiebreak` ascending, then index.
    pub fn by_scores(scores: Vec<f64>, tiebreak: &[f64], confidence: Option<f64>) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| {
            scores[b]
                .total_cmp(&scores[a])
                .then(tiebreak[a].total_cmp(&tiebreak[b]))
                .then(a.cmp(&b))
        });
        let tied = order.windows(2).any(|w| scores[w[0]] == scores[w[1]]);
        Self {
            order,
            scores,
            confidence,
            tied,
        }
    }

    /// `position[model]` = 0-based rank.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (r, &m) in self.order.iter().enumerate() {
            pos[m] = r;
        }
        pos
    }
}

/// Borda count over a win matrix; ties go to the smaller one-vs-all ratio,
/// then the smaller index.
pub fn borda_rank(w: &WinMatrix, tiebreak: &[f64], confidence: f64) -> Result<Ranking> {
    if tiebreak.len() != w.k {
        return Err(Error::InvalidConfig(format!(
            "tiebreak has {} entries for {} models",
            tiebreak.len(),
            w.k
        )));
    }
    let scores: Vec<f64> = (0..w.k)
        .map(|i| (0..w.k).filter(|&j| j != i && w.get(i, j)).count() as f64)
        .collect();
    Ok(Ranking::by_scores(scores, tiebreak, Some(confidence)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiTestResult {
    pub order: Order,
    pub mode: TestMode,
    pub alpha: f64,
    pub wins: WinMatrix,
    pub ranking: Ranking,
    /// One-vs-all ratios on the original samples.
    pub one_vs_all: Vec<f64>,
    pub ratios: PairwiseRatios,
    /// Row-major `k × k` pairwise results.
    pub tests: Vec<PairwiseTestResult>,
}

impl MultiTestResult {
    pub fn test(&self, i: usize, j: usize) -> &PairwiseTestResult {
        &self.tests[i * self.wins.k + j]
    }

    pub fn matrix_of(&self, f: impl Fn(&PairwiseTestResult) -> f64) -> Matrix {
        Matrix {
            k: self.wins.k,
            data: self.tests.iter().map(f).collect(),
        }
    }
}

/// Multi-testing over all pairs with Bonferroni level `alpha / k²` and a
/// Borda ranking at confidence `1 - alpha`.
pub fn multi_test(dists: &[EmpiricalDistribution], cfg: &TestConfig) -> Result<MultiTestResult> {
    cfg.validate()?;
    if dists.len() < 2 {
        return Err(Error::NeedAtLeastTwo(dists.len()));
    }
    if cfg.mode == TestMode::Relative {
        check_equal_sizes(dists)?;
    }
    BootstrapCache::build(dists, cfg.bootstrap, cfg.seed, cfg.paired)?.decide(cfg.order, cfg.mode, cfg.alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(v: &[f64]) -> EmpiricalDistribution {
        EmpiricalDistribution::from_samples(v).unwrap()
    }

    fn spread(n: usize, shift: f64, phase: f64) -> EmpiricalDistribution {
        let v: Vec<f64> = (0..n)
            .map(|i| shift + ((i as f64 * 0.618 + phase) % 1.0 - 0.5) * 2.0)
            .collect();
        dist(&v)
    }

    #[test]
    fn threshold_arithmetic() {
        let t = absolute_threshold(0.25, 0.05, 100, 100, 0.05);
        assert!((std_normal_quantile(0.05) + 1.6448536).abs() < 1e-6);
        assert!((t - 0.238369).abs() < 1e-5);
        assert!(0.10 <= t);
        assert!(relative_threshold(0.3, 100, 0.05) < 0.0);
    }

    #[test]
    fn config_validation() {
        let base = TestConfig::relative(Order::First);
        assert!(base.validate().is_ok());
        assert!(base.with_alpha(0.0).validate().is_err());
        assert!(base.with_alpha(1.0).validate().is_err());
        assert!(base.with_bootstrap(1).validate().is_err());
        assert!(TestConfig::absolute(Order::First, 0.0).validate().is_err());
        assert!(TestConfig::absolute(Order::First, 0.6).validate().is_err());
    }

    #[test]
    fn constant_inputs_have_zero_sigma() {
        let ds = vec![dist(&[1.0; 20]), dist(&[3.0; 20])];
        let cfg = TestConfig::relative(Order::First).with_bootstrap(50);
        let s = bootstrap_sigma(&ds, |r| r[0].mean() - r[1].mean(), &cfg).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn bootstrap_sigma_is_deterministic() {
        let wide: Vec<f64> = spread(200, 0.0, 0.4).values().iter().map(|v| 2.0 * v + 0.1).collect();
        let ds = vec![spread(200, 0.0, 0.1), dist(&wide)];
        let cfg = TestConfig::relative(Order::Second).with_bootstrap(64).with_seed(5);
        let stat = |r: &[EmpiricalDistribution]| pair_integrals(&r[0], &r[1]).ratio(Order::Second).value;
        let a = bootstrap_sigma(&ds, stat, &cfg).unwrap();
        let b = bootstrap_sigma(&ds, stat, &cfg).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert!(a > 0.0);
    }

    #[test]
    fn absolute_test_strict_dominance() {
        let y = spread(300, 0.0, 0.3);
        let x = spread(300, 10.0, 0.3);
        let cfg = TestConfig::absolute(Order::First, 0.25).with_bootstrap(100);
        let r = absolute_test(&x, &y, &cfg).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.reject_h0);
        let back = absolute_test(&y, &x, &cfg).unwrap();
        assert_eq!(back.statistic, 1.0);
        assert!(!back.reject_h0);
    }

    #[test]
    fn absolute_test_identical_is_no_decision() {
        let x = spread(50, 0.0, 0.0);
        let cfg = TestConfig::absolute(Order::Second, 0.5).with_bootstrap(20);
        let r = absolute_test(&x, &x, &cfg).unwrap();
        assert!(r.degenerate);
        assert!(!r.reject_h0);
        assert!(absolute_test(&x, &x, &TestConfig::relative(Order::First)).is_err());
    }

    #[test]
    fn relative_test_edge_cases() {
        let x = spread(100, 0.0, 0.2);
        let ds = vec![x.clone(), x.clone()];
        let cfg = TestConfig::relative(Order::First).with_bootstrap(50);
        let same = relative_test(&ds, 0, 0, &cfg).unwrap();
        assert_eq!(same.statistic, 0.0);
        assert_eq!(same.sigma_boot, 0.0);
        assert!(!same.reject_h0);
        for alpha in [0.01, 0.2, 0.45] {
            let r = relative_test(&ds, 0, 1, &cfg.with_alpha(alpha)).unwrap();
            assert_eq!(r.statistic, 0.0);
            assert!(!r.reject_h0);
        }
        let uneven = vec![x.clone(), spread(99, 0.0, 0.2)];
        assert_eq!(
            relative_test(&uneven, 0, 1, &cfg).unwrap_err(),
            Error::UnequalSampleSizes(100, 99)
        );
        assert!(relative_test(&ds, 0, 2, &cfg).is_err());
    }

    #[test]
    fn paired_requires_equal_sizes() {
        let ds = [spread(10, 0.0, 0.0), spread(12, 0.0, 0.0)];
        let cfg = TestConfig::absolute(Order::First, 0.3).with_bootstrap(10).with_paired(true);
        assert_eq!(
            absolute_test(&ds[0], &ds[1], &cfg).unwrap_err(),
            Error::UnequalSampleSizes(10, 12)
        );
    }

    #[test]
    fn borda_examples() {
        let upper = WinMatrix::from_rows(
            &[
                vec![false, true, true],
                vec![false, false, true],
                vec![false, false, false],
            ],
            0.0,
        )
        .unwrap();
        let r = borda_rank(&upper, &[0.9, 0.5, 0.1], 0.95).unwrap();
        assert_eq!(r.order, vec![0, 1, 2]);
        assert!(!r.tied);

        let none = WinMatrix::from_rows(&vec![vec![false; 3]; 3], 0.0).unwrap();
        let r = borda_rank(&none, &[0.4, 0.2, 0.4], 0.95).unwrap();
        assert_eq!(r.order, vec![1, 0, 2]);
        assert!(r.tied);

        // 0 beats 1, 1 beats 2, 2 beats 0
        let cycle = WinMatrix::from_rows(
            &[
                vec![false, true, false],
                vec![false, false, true],
                vec![true, false, false],
            ],
            0.0,
        )
        .unwrap();
        let r = borda_rank(&cycle, &[0.5, 0.3, 0.7], 0.95).unwrap();
        assert_eq!(r.scores, vec![1.0, 1.0, 1.0]);
        assert_eq!(r.order, vec![1, 0, 2]);
        assert!(borda_rank(&cycle, &[0.5], 0.95).is_err());
    }

    #[test]
    fn multi_test_identical_models_no_wins() {
        let x = spread(80, 1.0, 0.5);
        let ds = vec![x.clone(), x.clone(), x.clone()];
        for mode in [TestMode::Relative, TestMode::Absolute { eps0: 0.45 }] {
            for order in Order::BOTH {
                let cfg = TestConfig {
                    mode,
                    ..TestConfig::relative(order).with_bootstrap(40)
                };
                let res = multi_test(&ds, &cfg).unwrap();
                assert!(res.wins.wins.iter().all(|w| !w));
                assert_eq!(res.ranking.order, vec![0, 1, 2]);
                assert!(res.ranking.tied);
            }
        }
        assert_eq!(
            multi_test(&ds[..1], &TestConfig::relative(Order::First)).unwrap_err(),
            Error::NeedAtLeastTwo(1)
        );
    }
}
