//! Running the configured pipelines and assembling the JSON report.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use stodom_core::empirical::mix_seed;
use stodom_core::portfolio::mwr_per_metric;
use stodom_core::risk::TailPoint;
use stodom_core::{
    aggregate, build_portfolio, summarize, unify_polarity, BootstrapCache, EmpiricalDistribution, MetricsTable,
    MultiTestResult, MwrLevel, Order, Polarity, Ranking, RankingSet, TestMode,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::ingest::{apply_config, ingest};

pub const TOOL_NAME: &str = "stodom";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableInfo {
    pub models: Vec<String>,
    pub metrics: Vec<String>,
    pub n_samples: usize,
    pub weights: Vec<f64>,
    pub polarity: Vec<Polarity>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingReport {
    /// Model names, best first.
    pub order: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scores: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    /// Aggregation objective, for rank-aggregated keys.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    pub tied: bool,
}

impl RankingReport {
    fn from_ranking(r: &Ranking, models: &[String]) -> Self {
        Self {
            order: r.order.iter().map(|&m| models[m].clone()).collect(),
            scores: Some(r.scores.clone()),
            confidence: r.confidence,
            objective: None,
            tied: r.tied,
        }
    }
}

/// One multi-test run (one order) over a set of model distributions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderReport {
    pub order: Order,
    pub mode: TestMode,
    pub alpha: f64,
    pub corrected_alpha: f64,
    /// `eps[i][j]`: violation ratio of model `i` over model `j`.
    pub eps: Vec<Vec<f64>>,
    /// Test statistic per pair: `eps` (absolute) or `Δε` (relative).
    pub statistic: Vec<Vec<f64>>,
    pub sigma_boot: Vec<Vec<f64>>,
    pub sigma_hat: Vec<Vec<f64>>,
    pub threshold: Vec<Vec<f64>>,
    pub wins: Vec<Vec<bool>>,
    pub one_vs_all: Vec<f64>,
    /// Pairs whose distributions could not be told apart.
    pub degenerate_pairs: Vec<(String, String)>,
    pub ranking: RankingReport,
}

impl OrderReport {
    fn new(r: &MultiTestResult, models: &[String]) -> Self {
        Self {
            order: r.order,
            mode: r.mode,
            alpha: r.alpha,
            corrected_alpha: r.wins.corrected_alpha,
            eps: r.ratios.eps(r.order).rows(),
            statistic: r.matrix_of(|t| t.statistic).rows(),
            sigma_boot: r.matrix_of(|t| t.sigma_boot).rows(),
            sigma_hat: r.matrix_of(|t| t.sigma_hat).rows(),
            threshold: r.matrix_of(|t| t.threshold).rows(),
            wins: r.wins.rows(),
            one_vs_all: r.one_vs_all.clone(),
            degenerate_pairs: r
                .ratios
                .degenerate
                .iter()
                .map(|&(i, j)| (models[i].clone(), models[j].clone()))
                .collect(),
            ranking: RankingReport::from_ranking(&r.ranking, models),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathReport {
    pub seed: u64,
    pub tests: Vec<OrderReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub metric: String,
    pub seed: u64,
    pub tests: Vec<OrderReport>,
    pub mwr: Vec<f64>,
    pub mwr_ranking: RankingReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MwrReport {
    /// Metric name to per-model model-level win rate.
    pub model_level: BTreeMap<String, Vec<f64>>,
    pub sample_level: BTreeMap<String, Vec<f64>>,
    pub model_level_mean: Vec<f64>,
    pub sample_level_mean: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub portfolio_model_level: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub portfolio_sample_level: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanRiskRow {
    /// `portfolio` or a metric name.
    pub source: String,
    pub model: String,
    pub mu: f64,
    pub sigma: f64,
    pub delta: f64,
    pub tvar: Vec<TailPoint>,
    pub h: Vec<TailPoint>,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanRiskTable {
    /// Whether each risk column is consistent with second-order dominance.
    pub ssd_consistent: BTreeMap<String, bool>,
    pub rows: Vec<MeanRiskRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: ToolInfo,
    pub seed: u64,
    pub config: RunConfig,
    pub table: TableInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub portfolio: Option<PathReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub per_metric: Vec<MetricReport>,
    pub rankings: BTreeMap<String, RankingReport>,
    pub mwr: MwrReport,
    pub mean_risk: MeanRiskTable,
}

fn test_prefix(mode: TestMode) -> &'static str {
    match mode {
        TestMode::Relative => "R",
        TestMode::Absolute { .. } => "eps",
    }
}

fn order_tag(order: Order) -> &'static str {
    match order {
        Order::First => "FSD",
        Order::Second => "SSD",
    }
}

/// Seed of the per-metric bootstrap for metric `index`.
pub fn metric_seed(seed: u64, index: usize) -> u64 {
    mix_seed(seed, index as u64 + 1)
}

fn run_tests(dists: &[EmpiricalDistribution], cfg: &RunConfig, seed: u64, models: &[String]) -> Result<Vec<OrderReport>, CliError> {
    // validates the configuration for this seed before the expensive part
    cfg.test_config(Order::First, seed)?;
    let mode = cfg.test_mode()?;
    let cache = BootstrapCache::build(dists, cfg.bootstrap, seed, cfg.paired)?;
    cfg.order
        .orders()
        .into_iter()
        .map(|order| Ok(OrderReport::new(&cache.decide(order, mode, cfg.alpha)?, models)))
        .collect()
}

fn mwr_ranking(scores: &[f64], models: &[String]) -> RankingReport {
    let tiebreak = vec![0.0; scores.len()];
    RankingReport::from_ranking(&Ranking::by_scores(scores.to_vec(), &tiebreak, None), models)
}

fn rank_aggregate(rankings: &[&RankingReport], models: &[String], cfg: &RunConfig) -> Result<RankingReport, CliError> {
    let index: BTreeMap<&str, usize> = models.iter().enumerate().map(|(i, m)| (m.as_str(), i)).collect();
    let orders: Vec<Vec<usize>> = rankings
        .iter()
        .map(|r| r.order.iter().map(|m| index[m.as_str()]).collect())
        .collect();
    let consensus = aggregate(&RankingSet::uniform(&orders)?, cfg.rank_distance, cfg.exhaustive_limit)?;
    Ok(RankingReport {
        order: consensus.order.iter().map(|&m| models[m].clone()).collect(),
        scores: None,
        confidence: None,
        objective: Some(consensus.objective),
        tied: rankings.iter().any(|r| r.tied),
    })
}

fn mean_risk_rows(source: &str, dists: &[EmpiricalDistribution], models: &[String], cfg: &RunConfig) -> Result<Vec<MeanRiskRow>, CliError> {
    dists
        .iter()
        .zip(models)
        .map(|(d, model)| {
            let s = summarize(d, &cfg.tail_levels)?;
            Ok(MeanRiskRow {
                source: source.to_string(),
                model: model.clone(),
                mu: s.mu,
                sigma: s.sigma,
                delta: s.delta,
                tvar: s.tvar,
                h: s.h,
                gamma: s.gamma,
            })
        })
        .collect()
}

/// Single-metric table holding the portfolio values, for the MWR baselines.
fn portfolio_table(t: &MetricsTable, portfolios: &[Vec<f64>]) -> Result<MetricsTable, CliError> {
    let values = portfolios.iter().map(|v| vec![v.clone()]).collect();
    Ok(MetricsTable::new(t.models.clone(), vec!["portfolio".into()], t.sample_ids.clone(), values)?)
}

/// Runs every requested pipeline on an already loaded table.
pub fn run_table(raw: MetricsTable, cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let configured = apply_config(raw, cfg)?;
    let table = unify_polarity(&configured)?;
    let models = table.models.clone();
    let mut rankings = BTreeMap::new();

    let mut mean_risk = Vec::new();
    let mut portfolio = None;
    let mut mwr_portfolio = None;
    if cfg.aggregation.portfolio() {
        let pd = build_portfolio(&table)?;
        let tests = run_tests(&pd.per_model, cfg, cfg.seed, &models)?;
        for t in &tests {
            let key = format!("{}-{}@P", test_prefix(t.mode), order_tag(t.order));
            rankings.insert(key, t.ranking.clone());
        }
        let values: Vec<Vec<f64>> = (0..table.k()).map(|a| pd.values_in_sample_order(a)).collect();
        let pt = portfolio_table(&table, &values)?;
        let model_level = stodom_core::mwr(&pt, MwrLevel::Model);
        rankings.insert("MWR@P".into(), mwr_ranking(&model_level, &models));
        mwr_portfolio = Some((model_level, stodom_core::mwr(&pt, MwrLevel::Sample)));
        mean_risk.extend(mean_risk_rows("portfolio", &pd.per_model, &models, cfg)?);
        portfolio = Some(PathReport { seed: cfg.seed, tests });
    }

    let model_level = mwr_per_metric(&table, MwrLevel::Model);
    let sample_level = mwr_per_metric(&table, MwrLevel::Sample);

    let mut per_metric = Vec::new();
    if cfg.aggregation.per_metric() {
        per_metric = (0..table.n_metrics())
            .into_par_iter()
            .map(|mi| {
                let seed = metric_seed(cfg.seed, mi);
                let dists = table.metric_distributions(mi)?;
                Ok(MetricReport {
                    metric: table.metrics[mi].clone(),
                    seed,
                    tests: run_tests(&dists, cfg, seed, &models)?,
                    mwr: model_level[mi].clone(),
                    mwr_ranking: mwr_ranking(&model_level[mi], &models),
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        for (idx, order) in cfg.order.orders().into_iter().enumerate() {
            let inputs: Vec<&RankingReport> = per_metric.iter().map(|m| &m.tests[idx].ranking).collect();
            let mode = per_metric[0].tests[idx].mode;
            let key = format!("RA({}-{}@M)", test_prefix(mode), order_tag(order));
            rankings.insert(key, rank_aggregate(&inputs, &models, cfg)?);
        }
        let inputs: Vec<&RankingReport> = per_metric.iter().map(|m| &m.mwr_ranking).collect();
        rankings.insert("RA(MWR@M)".into(), rank_aggregate(&inputs, &models, cfg)?);
    }

    for mi in 0..table.n_metrics() {
        mean_risk.extend(mean_risk_rows(&table.metrics[mi], &table.metric_distributions(mi)?, &models, cfg)?);
    }

    let mean_of = |rows: &[Vec<f64>]| -> Vec<f64> {
        (0..table.k())
            .map(|a| rows.iter().map(|r| r[a]).sum::<f64>() / rows.len() as f64)
            .collect()
    };
    let by_metric = |rows: &[Vec<f64>]| -> BTreeMap<String, Vec<f64>> {
        table.metrics.iter().cloned().zip(rows.iter().cloned()).collect()
    };
    let (portfolio_model_level, portfolio_sample_level) = match mwr_portfolio {
        Some((m, s)) => (Some(m), Some(s)),
        None => (None, None),
    };
    let mwr = MwrReport {
        model_level: by_metric(&model_level),
        sample_level: by_metric(&sample_level),
        model_level_mean: mean_of(&model_level),
        sample_level_mean: mean_of(&sample_level),
        portfolio_model_level,
        portfolio_sample_level,
    };

    let mut ssd_consistent = BTreeMap::new();
    for (name, ok) in [("sigma", false), ("delta", true), ("tvar", true), ("h", true), ("gamma", true)] {
        ssd_consistent.insert(name.to_string(), ok);
    }

    Ok(Report {
        tool: ToolInfo {
            name: TOOL_NAME.into(),
            version: VERSION.into(),
        },
        seed: cfg.seed,
        config: cfg.clone(),
        table: TableInfo {
            models,
            metrics: configured.metrics.clone(),
            n_samples: configured.n_samples(),
            weights: configured.weights.clone(),
            polarity: configured.polarity.clone(),
        },
        portfolio,
        per_metric,
        rankings,
        mwr,
        mean_risk: MeanRiskTable {
            ssd_consistent,
            rows: mean_risk,
        },
    })
}

/// Loads the input named in `cfg` and runs it.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    if cfg.input.as_os_str().is_empty() {
        return Err(CliError::Config("no input file given".into()));
    }
    cfg.validate()?;
    let table = ingest(&cfg.input, cfg.input_format())?;
    run_table(table, cfg)
}

pub fn report_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("report serialises")
}

/// Radar-plot data: one row per (source, model).
pub fn mean_risk_csv(report: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let levels: Vec<f64> = report.config.tail_levels.clone();
    let mut header = vec!["source".to_string(), "model".into(), "mu".into(), "sigma".into(), "delta".into()];
    header.extend(levels.iter().map(|p| format!("tvar_{p}")));
    header.extend(levels.iter().map(|p| format!("h_{p}")));
    header.push("gamma".into());
    w.write_record(&header).expect("in-memory write");
    for row in &report.mean_risk.rows {
        let mut rec = vec![row.source.clone(), row.model.clone(), row.mu.to_string(), row.sigma.to_string(), row.delta.to_string()];
        rec.extend(row.tvar.iter().map(|t| t.value.to_string()));
        rec.extend(row.h.iter().map(|t| t.value.to_string()));
        rec.push(row.gamma.to_string());
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

/// Path of `mean_risk.csv`, next to the report file.
pub fn mean_risk_path(report_path: &Path) -> PathBuf {
    report_path
        .parent()
        .map_or_else(|| PathBuf::from("mean_risk.csv"), |dir| dir.join("mean_risk.csv"))
}

/// Writes the report to `cfg.output` (plus `mean_risk.csv` beside it), or
/// the report alone to stdout.
pub fn write_report(report: &Report, output: Option<&Path>) -> Result<(), CliError> {
    let json = report_json(report);
    match output {
        Some(path) => {
            fs::write(path, json + "\n").map_err(|e| CliError::io(path, e))?;
            let csv_path = mean_risk_path(path);
            fs::write(&csv_path, mean_risk_csv(report)).map_err(|e| CliError::io(&csv_path, e))
        }
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{json}").map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}
