//! Multi-metric evaluation tables and the metrics portfolio.
//!
//! Each metric is normalised by the empirical CDF of its values pooled over
//! every model and sample, and the per-sample portfolio value of a model is
//! the weighted geometric mean `exp(Σ λ_i log F_i(m_i))` of those CDF values.

use serde::{Deserialize, Serialize};

use crate::empirical::EmpiricalDistribution;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    HigherBetter,
    LowerBetter,
    /// Probabilities in (0, 1] mapped to `-log(x)`.
    NegLog,
}

impl std::str::FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "higher_better" | "higher" => Ok(Polarity::HigherBetter),
            "lower_better" | "lower" => Ok(Polarity::LowerBetter),
            "neg_log" => Ok(Polarity::NegLog),
            other => Err(Error::InvalidConfig(format!("unknown polarity `{other}`"))),
        }
    }
}

/// `k` models × `N` metrics × `n` samples of raw evaluations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsTable {
    pub models: Vec<String>,
    pub metrics: Vec<String>,
    pub sample_ids: Vec<String>,
    /// `values[model][metric][sample]`
    pub values: Vec<Vec<Vec<f64>>>,
    pub polarity: Vec<Polarity>,
    pub weights: Vec<f64>,
}

impl MetricsTable {
    /// Table with every metric `HigherBetter` and uniform weights.
    pub fn new(
        models: Vec<String>,
        metrics: Vec<String>,
        sample_ids: Vec<String>,
        values: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let n_metrics = metrics.len();
        let table = Self {
            polarity: vec![Polarity::HigherBetter; n_metrics],
            weights: vec![1.0 / n_metrics.max(1) as f64; n_metrics],
            models,
            metrics,
            sample_ids,
            values,
        };
        table.check_shape()?;
        Ok(table)
    }

    pub fn k(&self) -> usize {
        self.models.len()
    }

    pub fn n_metrics(&self) -> usize {
        self.metrics.len()
    }

    pub fn n_samples(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn check_shape(&self) -> Result<()> {
        if self.models.is_empty() || self.metrics.is_empty() || self.sample_ids.is_empty() {
            return Err(Error::EmptyInput);
        }
        let (k, nm, n) = (self.k(), self.n_metrics(), self.n_samples());
        if self.values.len() != k
            || self
                .values
                .iter()
                .any(|per_model| per_model.len() != nm || per_model.iter().any(|s| s.len() != n))
        {
            return Err(Error::InvalidConfig(format!(
                "values must have shape {k} x {nm} x {n}"
            )));
        }
        if self.polarity.len() != nm {
            return Err(Error::InvalidConfig(format!(
                "expected {nm} polarities, got {}",
                self.polarity.len()
            )));
        }
        for (a, per_model) in self.values.iter().enumerate() {
            for (mi, samples) in per_model.iter().enumerate() {
                if let Some((s, &v)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "non-finite value {v} at model `{}`, metric `{}`, sample `{}`",
                        self.models[a], self.metrics[mi], self.sample_ids[s]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn check_weights(&self) -> Result<()> {
        if self.weights.len() != self.n_metrics() {
            return Err(Error::WeightMismatch {
                expected: self.n_metrics(),
                got: self.weights.len(),
            });
        }
        let sum: f64 = self.weights.iter().sum();
        if self.weights.iter().any(|&w| !(w >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidWeights);
        }
        Ok(())
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        self.weights = weights;
        self.check_weights()?;
        Ok(self)
    }

    pub fn with_polarity(mut self, polarity: Vec<Polarity>) -> Result<Self> {
        if polarity.len() != self.n_metrics() {
            return Err(Error::InvalidConfig(format!(
                "expected {} polarities, got {}",
                self.n_metrics(),
                polarity.len()
            )));
        }
        self.polarity = polarity;
        Ok(self)
    }

    /// Distribution of one metric for one model.
    pub fn distribution(&self, model: usize, metric: usize) -> Result<EmpiricalDistribution> {
        EmpiricalDistribution::from_samples(&self.values[model][metric])
    }

    /// Per-model distributions of one metric.
    pub fn metric_distributions(&self, metric: usize) -> Result<Vec<EmpiricalDistribution>> {
        (0..self.k()).map(|a| self.distribution(a, metric)).collect()
    }
}

/// Maps every metric to "larger is preferable"; afterwards all polarities
/// read `HigherBetter`.
pub fn unify_polarity(t: &MetricsTable) -> Result<MetricsTable> {
    let mut out = t.clone();
    for (mi, &pol) in t.polarity.iter().enumerate() {
        for a in 0..t.k() {
            for (s, v) in out.values[a][mi].iter_mut().enumerate() {
                *v = match pol {
                    Polarity::HigherBetter => *v,
                    Polarity::LowerBetter => -*v,
                    Polarity::NegLog => {
                        if !(*v > 0.0 && *v <= 1.0) {
                            return Err(Error::InvalidConfig(format!(
                                "neg_log value {} outside (0, 1] at model `{}`, metric `{}`, sample `{}`",
                                v, t.models[a], t.metrics[mi], t.sample_ids[s]
                            )));
                        }
                        -v.ln()
                    }
                };
            }
        }
        out.polarity[mi] = Polarity::HigherBetter;
    }
    Ok(out)
}

/// Pooled per-metric CDFs that define the portfolio transform.
#[derive(Debug, Clone)]
pub struct Portfolio {
    pools: Vec<EmpiricalDistribution>,
    weights: Vec<f64>,
}

impl Portfolio {
    /// Pools every metric over all models and samples of a unified table.
    pub fn fit(t: &MetricsTable) -> Result<Self> {
        t.check_weights()?;
        let pools = (0..t.n_metrics())
            .map(|mi| {
                let pooled: Vec<f64> = t.values.iter().flat_map(|m| m[mi].iter().copied()).collect();
                EmpiricalDistribution::from_samples(&pooled)
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            pools,
            weights: t.weights.clone(),
        })
    }

    pub fn pools(&self) -> &[EmpiricalDistribution] {
        &self.pools
    }

    /// Portfolio value from pre-computed CDF values.
    pub fn combine(weights: &[f64], cdf_values: &[f64]) -> f64 {
        weights
            .iter()
            .zip(cdf_values)
            .filter(|(&w, _)| w > 0.0)
            .map(|(w, f)| w * f.ln())
            .sum::<f64>()
            .exp()
    }

    /// Portfolio value of one sample whose metric values come from the
    /// pooled data.
    pub fn value(&self, metric_values: &[f64]) -> f64 {
        let cdfs: Vec<f64> = self
            .pools
            .iter()
            .zip(metric_values)
            .map(|(pool, &x)| pool.cdf_at(x))
            .collect();
        Self::combine(&self.weights, &cdfs)
    }

    /// Portfolio value of a held-out sample; each CDF is clamped to
    /// `[1 / (N_pool + 1), 1]` so the result stays finite.
    pub fn value_held_out(&self, metric_values: &[f64]) -> f64 {
        let cdfs: Vec<f64> = self
            .pools
            .iter()
            .zip(metric_values)
            .map(|(pool, &x)| pool.cdf_at(x).clamp(1.0 / (pool.len() + 1) as f64, 1.0))
            .collect();
        Self::combine(&self.weights, &cdfs)
    }
}

/// Per-model portfolio values, kept in sample order.
#[derive(Debug, Clone)]
pub struct PortfolioDistribution {
    pub per_model: Vec<EmpiricalDistribution>,
}

impl PortfolioDistribution {
    /// Portfolio values of model `a` in sample order.
    pub fn values_in_sample_order(&self, a: usize) -> Vec<f64> {
        self.per_model[a].raw_order().unwrap_or_default()
    }
}

/// Builds the per-model portfolio distributions of a unified table.
pub fn build_portfolio(t: &MetricsTable) -> Result<PortfolioDistribution> {
    let pf = Portfolio::fit(t)?;
    let per_model = (0..t.k())
        .map(|a| {
            let vals: Vec<f64> = (0..t.n_samples())
                .map(|s| {
                    let sample: Vec<f64> = (0..t.n_metrics()).map(|mi| t.values[a][mi][s]).collect();
                    pf.value(&sample)
                })
                .collect();
            EmpiricalDistribution::from_samples(&vals)
        })
        .collect::<Result<_>>()?;
    Ok(PortfolioDistribution { per_model })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MwrLevel {
    /// Compare per-model metric means.
    Model,
    /// Count samples where a model matches or beats every other model.
    Sample,
}

/// Mean win rate per metric: `out[metric][model]`.
pub fn mwr_per_metric(t: &MetricsTable, level: MwrLevel) -> Vec<Vec<f64>> {
    let k = t.k();
    (0..t.n_metrics())
        .map(|mi| match level {
            MwrLevel::Model => {
                let means: Vec<f64> = (0..k)
                    .map(|a| t.values[a][mi].iter().sum::<f64>() / t.n_samples() as f64)
                    .collect();
                (0..k)
                    .map(|a| {
                        if k < 2 {
                            return 1.0;
                        }
                        let beaten = (0..k).filter(|&b| b != a && means[b] <= means[a]).count();
                        beaten as f64 / (k - 1) as f64
                    })
                    .collect()
            }
            MwrLevel::Sample => (0..k)
                .map(|a| {
                    let n = t.n_samples();
                    let wins = (0..n)
                        .filter(|&s| {
                            (0..k)
                                .filter(|&b| b != a)
                                .all(|b| t.values[b][mi][s] <= t.values[a][mi][s])
                        })
                        .count();
                    wins as f64 / n as f64
                })
                .collect(),
        })
        .collect()
}

/// Mean win rate averaged over metrics, one score per model.
pub fn mwr(t: &MetricsTable, level: MwrLevel) -> Vec<f64> {
    let per_metric = mwr_per_metric(t, level);
    let nm = per_metric.len() as f64;
    (0..t.k())
        .map(|a| per_metric.iter().map(|m| m[a]).sum::<f64>() / nm)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn table(values: Vec<Vec<Vec<f64>>>) -> MetricsTable {
        let k = values.len();
        let nm = values[0].len();
        let n = values[0][0].len();
        MetricsTable::new(names("m", k), names("metric", nm), names("s", n), values).unwrap()
    }

    #[test]
    fn polarity_unification() {
        let t = table(vec![vec![vec![1.0, 2.0, 3.0], vec![1.0, 0.5, 0.25]]])
            .with_polarity(vec![Polarity::LowerBetter, Polarity::NegLog])
            .unwrap();
        let u = unify_polarity(&t).unwrap();
        assert_eq!(u.values[0][0], vec![-1.0, -2.0, -3.0]);
        assert_eq!(u.values[0][1][0], 0.0);
        assert!((u.values[0][1][2] - 4f64.ln()).abs() < 1e-15);
        assert!(u.polarity.iter().all(|&p| p == Polarity::HigherBetter));
        assert_eq!(unify_polarity(&u).unwrap(), u);

        let bad = table(vec![vec![vec![0.0]]]).with_polarity(vec![Polarity::NegLog]).unwrap();
        assert!(unify_polarity(&bad).is_err());
    }

    #[test]
    fn single_metric_portfolio_is_pooled_rank() {
        let t = table(vec![vec![vec![1.0, 4.0]], vec![vec![2.0, 3.0]]]);
        let p = build_portfolio(&t).unwrap();
        assert_eq!(p.values_in_sample_order(0), vec![0.25, 1.0]);
        assert_eq!(p.values_in_sample_order(1), vec![0.5, 0.75]);
        for d in &p.per_model {
            assert!(d.values().iter().all(|&v| v > 0.0 && v <= 1.0));
        }
    }

    #[test]
    fn geometric_mean_of_cdfs() {
        let r = Portfolio::combine(&[0.5, 0.5], &[0.25, 0.81]);
        assert!((r - 0.45).abs() < 1e-15);
        // zero weight on a zero CDF does not poison the product
        assert_eq!(Portfolio::combine(&[1.0, 0.0], &[0.5, 0.0]), 0.5);
    }

    #[test]
    fn weights_are_checked() {
        let t = table(vec![vec![vec![1.0], vec![2.0]]]);
        assert_eq!(
            t.clone().with_weights(vec![1.0]).unwrap_err(),
            Error::WeightMismatch { expected: 2, got: 1 }
        );
        assert_eq!(t.clone().with_weights(vec![0.7, 0.7]).unwrap_err(), Error::InvalidWeights);
        assert_eq!(t.clone().with_weights(vec![1.5, -0.5]).unwrap_err(), Error::InvalidWeights);
        assert!(t.with_weights(vec![0.25, 0.75]).is_ok());
    }

    #[test]
    fn held_out_values_are_clamped() {
        let t = table(vec![vec![vec![1.0, 2.0]], vec![vec![3.0, 4.0]]]);
        let pf = Portfolio::fit(&t).unwrap();
        assert_eq!(pf.value_held_out(&[-10.0]), 0.2);
        assert_eq!(pf.value_held_out(&[10.0]), 1.0);
        assert_eq!(pf.value(&[2.5]), 0.5);
    }

    #[test]
    fn mean_win_rates() {
        let t = table(vec![
            vec![vec![2.0, 3.0, 4.0, 5.0], vec![1.0, 1.0, 1.0, 1.0]],
            vec![vec![1.0, 1.0, 5.0, 1.0], vec![0.0, 0.0, 0.0, 0.0]],
        ]);
        assert_eq!(mwr(&t, MwrLevel::Model), vec![1.0, 0.0]);
        let per_metric = mwr_per_metric(&t, MwrLevel::Sample);
        assert_eq!(per_metric[0], vec![0.75, 0.25]);

        let same = table(vec![vec![vec![1.0, 2.0]], vec![vec![1.0, 2.0]], vec![vec![1.0, 2.0]]]);
        assert_eq!(mwr(&same, MwrLevel::Model), vec![1.0; 3]);
        assert_eq!(mwr(&same, MwrLevel::Sample), vec![1.0; 3]);
    }

    #[test]
    fn ragged_shapes_rejected() {
        let res = MetricsTable::new(
            names("m", 2),
            names("x", 1),
            names("s", 2),
            vec![vec![vec![1.0, 2.0]], vec![vec![1.0]]],
        );
        assert!(res.is_err());
    }
}
