//! Reading metric tables from long CSV or nested JSON.
//!
//! CSV keeps models, metrics and sample ids in order of first appearance.
//! JSON objects are read in key order and sample ids are array positions.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::Read;
use std::path::Path;

use stodom_core::{MetricsTable, Polarity};

use crate::config::{InputFormat, RunConfig};
use crate::error::CliError;

const HEADER: [&str; 4] = ["model", "metric", "sample_id", "value"];

pub fn ingest(path: &Path, format: InputFormat) -> Result<MetricsTable, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    match format {
        InputFormat::LongCsv => ingest_csv(file),
        InputFormat::Json => ingest_json(file),
    }
}

#[derive(Default)]
struct Labels {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Labels {
    fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), self.names.len() - 1);
        self.names.len() - 1
    }
}

pub fn ingest_csv<R: Read>(reader: R) -> Result<MetricsTable, CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let parse_err = |location: String, e: &dyn std::fmt::Display| CliError::Parse {
        location,
        message: e.to_string(),
    };
    let header = rdr.headers().map_err(|e| parse_err("header".into(), &e))?.clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(CliError::Parse {
            location: "header".into(),
            message: format!("expected `{}`, got `{}`", HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")),
        });
    }

    let (mut models, mut metrics, mut samples) = (Labels::default(), Labels::default(), Labels::default());
    let mut cells: HashMap<(usize, usize, usize), f64> = HashMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(format!("line {line}"), &e)
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let value: f64 = record[3]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| CliError::Parse {
                location: format!("line {line}"),
                message: format!("`{}` is not a finite number", &record[3]),
            })?;
        let key = (models.intern(&record[0]), metrics.intern(&record[1]), samples.intern(&record[2]));
        if cells.insert(key, value).is_some() {
            return Err(CliError::DuplicateCell {
                model: record[0].to_string(),
                metric: record[1].to_string(),
                sample: record[2].to_string(),
            });
        }
    }
    if cells.is_empty() {
        return Err(CliError::Parse {
            location: "body".into(),
            message: "no data rows".into(),
        });
    }

    let mut values = Vec::with_capacity(models.names.len());
    for (a, model) in models.names.iter().enumerate() {
        let mut per_model = Vec::with_capacity(metrics.names.len());
        for (mi, metric) in metrics.names.iter().enumerate() {
            let row = samples
                .names
                .iter()
                .enumerate()
                .map(|(s, sample)| {
                    cells.get(&(a, mi, s)).copied().ok_or_else(|| CliError::RaggedTable {
                        model: model.clone(),
                        metric: metric.clone(),
                        sample: sample.clone(),
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            per_model.push(row);
        }
        values.push(per_model);
    }
    Ok(MetricsTable::new(models.names, metrics.names, samples.names, values)?)
}

pub fn ingest_json<R: Read>(reader: R) -> Result<MetricsTable, CliError> {
    let nested: BTreeMap<String, BTreeMap<String, Vec<f64>>> =
        serde_json::from_reader(reader).map_err(|e| CliError::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
    let models: Vec<String> = nested.keys().cloned().collect();
    let mut metrics: Vec<String> = nested.values().flat_map(|m| m.keys().cloned()).collect();
    metrics.sort();
    metrics.dedup();
    let n = nested.values().flat_map(|m| m.values().map(Vec::len)).max().unwrap_or(0);
    if models.is_empty() || n == 0 {
        return Err(CliError::Parse {
            location: "root".into(),
            message: "no data".into(),
        });
    }
    let sample_ids: Vec<String> = (0..n).map(|s| s.to_string()).collect();

    let mut values = Vec::with_capacity(models.len());
    for model in &models {
        let per_model = metrics
            .iter()
            .map(|metric| {
                let row = nested[model].get(metric).map(Vec::as_slice).unwrap_or(&[]);
                if row.len() < n {
                    return Err(CliError::RaggedTable {
                        model: model.clone(),
                        metric: metric.clone(),
                        sample: sample_ids[row.len()].clone(),
                    });
                }
                Ok(row.to_vec())
            })
            .collect::<Result<Vec<_>, _>>()?;
        values.push(per_model);
    }
    Ok(MetricsTable::new(models, metrics, sample_ids, values)?)
}

/// Applies the configured polarities and portfolio weights.
pub fn apply_config(table: MetricsTable, cfg: &RunConfig) -> Result<MetricsTable, CliError> {
    let unknown = |name: &String| {
        (!table.metrics.contains(name)).then(|| CliError::Config(format!("unknown metric `{name}`")))
    };
    if let Some(e) = cfg.polarity.keys().chain(cfg.weights.keys()).find_map(unknown) {
        return Err(e);
    }
    let polarity: Vec<Polarity> = table
        .metrics
        .iter()
        .map(|m| cfg.polarity.get(m).copied().unwrap_or(Polarity::HigherBetter))
        .collect();
    let mut table = table.with_polarity(polarity)?;
    if !cfg.weights.is_empty() {
        let weights = table.metrics.iter().map(|m| cfg.weights.get(m).copied().unwrap_or(0.0)).collect();
        table = table.with_weights(weights)?;
    }
    Ok(table)
}
