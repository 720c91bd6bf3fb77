//! Run configuration: a TOML or JSON file plus command-line overrides.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stodom_core::rank_agg::DEFAULT_EXHAUSTIVE_LIMIT;
use stodom_core::risk::DEFAULT_TAIL_LEVELS;
use stodom_core::{Order, Polarity, RankDistance, TestConfig, TestMode};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    LongCsv,
    Json,
}

impl InputFormat {
    /// Guess from the file extension; anything but `.json` is read as CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => InputFormat::Json,
            _ => InputFormat::LongCsv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeChoice {
    Absolute,
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderChoice {
    #[serde(rename = "1")]
    First,
    #[serde(rename = "2")]
    Second,
    #[serde(rename = "both")]
    Both,
}

impl OrderChoice {
    pub fn orders(self) -> Vec<Order> {
        match self {
            OrderChoice::First => vec![Order::First],
            OrderChoice::Second => vec![Order::Second],
            OrderChoice::Both => Order::BOTH.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    Portfolio,
    PerMetricRankAgg,
    Both,
}

impl Aggregation {
    pub fn portfolio(self) -> bool {
        matches!(self, Aggregation::Portfolio | Aggregation::Both)
    }

    pub fn per_metric(self) -> bool {
        matches!(self, Aggregation::PerMetricRankAgg | Aggregation::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: PathBuf,
    /// Inferred from the input extension when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<InputFormat>,
    pub mode: ModeChoice,
    pub order: OrderChoice,
    pub aggregation: Aggregation,
    /// Required in absolute mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps0: Option<f64>,
    pub alpha: f64,
    pub bootstrap: usize,
    pub seed: u64,
    /// Metric name to portfolio weight; missing metrics get weight 0 when
    /// any weight is given, uniform weights otherwise.
    pub weights: BTreeMap<String, f64>,
    /// Metric name to polarity; unlisted metrics are higher-is-better.
    pub polarity: BTreeMap<String, Polarity>,
    pub paired: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub rank_distance: RankDistance,
    pub exhaustive_limit: usize,
    pub tail_levels: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: PathBuf::new(),
            format: None,
            mode: ModeChoice::Relative,
            order: OrderChoice::Both,
            aggregation: Aggregation::Both,
            eps0: None,
            alpha: 0.05,
            bootstrap: 1000,
            seed: 0,
            weights: BTreeMap::new(),
            polarity: BTreeMap::new(),
            paired: false,
            output: None,
            rank_distance: RankDistance::Spearman,
            exhaustive_limit: DEFAULT_EXHAUSTIVE_LIMIT,
            tail_levels: DEFAULT_TAIL_LEVELS.to_vec(),
        }
    }
}

impl RunConfig {
    /// Reads a `.json` config, otherwise TOML.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let parsed = if InputFormat::from_path(path) == InputFormat::Json {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|message| CliError::Config(format!("{}: {message}", path.display())))
    }

    pub fn input_format(&self) -> InputFormat {
        self.format.unwrap_or_else(|| InputFormat::from_path(&self.input))
    }

    pub fn test_mode(&self) -> Result<TestMode, CliError> {
        match self.mode {
            ModeChoice::Relative => Ok(TestMode::Relative),
            ModeChoice::Absolute => self
                .eps0
                .map(|eps0| TestMode::Absolute { eps0 })
                .ok_or_else(|| CliError::Config("absolute mode needs eps0".into())),
        }
    }

    /// Test configuration for one order, seeded with `seed`.
    pub fn test_config(&self, order: Order, seed: u64) -> Result<TestConfig, CliError> {
        let cfg = TestConfig {
            order,
            mode: self.test_mode()?,
            alpha: self.alpha,
            bootstrap: self.bootstrap,
            seed,
            paired: self.paired,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every setting except the input path.
    pub fn validate(&self) -> Result<(), CliError> {
        self.test_config(Order::First, self.seed)?;
        if self.tail_levels.iter().any(|p| !(*p > 0.0 && *p <= 1.0)) {
            return Err(CliError::Config("tail levels must lie in (0, 1]".into()));
        }
        if self.weights.values().any(|w| !(*w >= 0.0)) {
            return Err(CliError::Config("weights must be non-negative".into()));
        }
        Ok(())
    }
}
