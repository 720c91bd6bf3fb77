//! Risk-aware ranking of models through stochastic dominance.
//!
//! The crate compares the per-sample score distributions of `k` models with
//! first- and second-order stochastic dominance. Violation ratios measure how
//! far a pair is from strict dominance, bootstrap replicates quantify their
//! uncertainty, and a Bonferroni-corrected multi-test with a Borda count
//! turns the pairwise decisions into one ranking.
//!
//! * [`empirical`]: empirical distributions, quantiles, integrated quantiles
//! * [`dominance`]: violation ratios, `W₂` and `d_IQ`, one-vs-all statistics
//! * [`risk`]: mean-risk summaries (TVaR, Gini tail, ...)
//! * [`testing`]: absolute and relative tests, multi-testing, Borda ranking
//! * [`portfolio`]: multi-metric tables, pooled-CDF portfolio, mean win rates
//! * [`rank_agg`]: consensus of per-metric rankings

pub mod dominance;
pub mod empirical;
pub mod error;
pub mod portfolio;
pub mod rank_agg;
pub mod risk;
pub mod testing;

pub use dominance::{
    d_iq_distance, fsd_violation_ratio, pairwise_ratios, relative_stats, ssd_violation_ratio, Matrix,
    Order, PairwiseRatios, RelativeStats, ViolationRatio,
};
pub use empirical::{pooled_cdf_at, BootstrapSeed, EmpiricalDistribution};
pub use error::{Error, Result};
pub use portfolio::{build_portfolio, mwr, unify_polarity, MetricsTable, MwrLevel, Polarity};
pub use rank_agg::{aggregate, aggregate_oracle, Consensus, RankDistance, RankingSet};
pub use risk::{mean_risk_score, summarize, MeanRiskSummary, RiskMeasure};
pub use testing::{
    absolute_test, borda_rank, bootstrap_sigma, multi_test, relative_test, BootstrapCache,
    MultiTestResult, PairwiseTestResult, Ranking, TestConfig, TestMode, WinMatrix,
};
