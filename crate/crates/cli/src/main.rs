use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use stodom_cli::{
    power_csv, run, validate_gaussian, write_report, Aggregation, InputFormat, ModeChoice, OrderChoice, RunConfig,
    ValidationConfig,
};
use stodom_core::Polarity;

#[derive(Parser)]
#[command(name = "stodom", version, about = "Rank models by stochastic dominance of their evaluation scores")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run dominance tests on a metric table and write a JSON report.
    Run(RunArgs),
    /// Power study on synthetic Gaussians; writes power.csv rows.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML or JSON config; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Metric table (long CSV or nested JSON).
    #[arg(long)]
    input: Option<PathBuf>,
    /// long_csv or json; guessed from the extension when omitted.
    #[arg(long)]
    format: Option<String>,
    /// absolute or relative.
    #[arg(long)]
    mode: Option<String>,
    /// 1, 2 or both.
    #[arg(long)]
    order: Option<String>,
    /// portfolio, per_metric_rank_agg or both.
    #[arg(long)]
    aggregation: Option<String>,
    #[arg(long)]
    eps0: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Bootstrap iterations.
    #[arg(long)]
    bootstrap: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Portfolio weights, e.g. `bleu=0.5,rouge=0.5`.
    #[arg(long)]
    weights: Option<String>,
    /// Metric polarities, e.g. `toxicity=neg_log,length=lower_better`.
    #[arg(long)]
    polarity: Option<String>,
    /// Resample all models with one shared index vector.
    #[arg(long)]
    paired: bool,
    /// Report path; `mean_risk.csv` is written beside it. Stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [100, 250, 500, 1000, 2000])]
    n_grid: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    bootstrap: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0.45)]
    tau: f64,
    /// CSV path; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn pairs(list: &str) -> Result<Vec<(String, String)>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (k, v) = item
                .split_once('=')
                .with_context(|| format!("expected `name=value`, got `{item}`"))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn choice<T>(value: &str, options: &[(&str, T)], flag: &str) -> Result<T>
where
    T: Copy,
{
    match options.iter().find(|(name, _)| *name == value) {
        Some(&(_, v)) => Ok(v),
        None => {
            let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
            bail!("--{flag} must be one of {}, got `{value}`", names.join(", "))
        }
    }
}

fn build_config(args: RunArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = args.input {
        cfg.input = v;
    }
    if let Some(v) = args.format {
        cfg.format = Some(choice(&v, &[("long_csv", InputFormat::LongCsv), ("json", InputFormat::Json)], "format")?);
    }
    if let Some(v) = args.mode {
        cfg.mode = choice(&v, &[("absolute", ModeChoice::Absolute), ("relative", ModeChoice::Relative)], "mode")?;
    }
    if let Some(v) = args.order {
        let options = [("1", OrderChoice::First), ("2", OrderChoice::Second), ("both", OrderChoice::Both)];
        cfg.order = choice(&v, &options, "order")?;
    }
    if let Some(v) = args.aggregation {
        let options = [
            ("portfolio", Aggregation::Portfolio),
            ("per_metric_rank_agg", Aggregation::PerMetricRankAgg),
            ("both", Aggregation::Both),
        ];
        cfg.aggregation = choice(&v, &options, "aggregation")?;
    }
    if args.eps0.is_some() {
        cfg.eps0 = args.eps0;
    }
    if let Some(v) = args.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = args.bootstrap {
        cfg.bootstrap = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(list) = args.weights {
        let mut weights = BTreeMap::new();
        for (name, value) in pairs(&list)? {
            let w: f64 = value.parse().with_context(|| format!("weight of `{name}` is not a number"))?;
            weights.insert(name, w);
        }
        cfg.weights = weights;
    }
    if let Some(list) = args.polarity {
        for (name, value) in pairs(&list)? {
            let p: Polarity = value.parse()?;
            cfg.polarity.insert(name, p);
        }
    }
    if args.paired {
        cfg.paired = true;
    }
    if args.out.is_some() {
        cfg.output = args.out;
    }
    Ok(cfg)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => {
            let cfg = build_config(args)?;
            let report = run(&cfg)?;
            write_report(&report, cfg.output.as_deref())?;
        }
        Command::Validate(args) => {
            let cfg = ValidationConfig {
                n_grid: args.n_grid,
                trials: args.trials,
                seed: args.seed,
                bootstrap: args.bootstrap,
                alpha: args.alpha,
                tau: args.tau,
            };
            let csv = power_csv(&validate_gaussian(&cfg)?);
            match args.out {
                Some(path) => fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{csv}"),
            }
        }
    }
    Ok(())
}
