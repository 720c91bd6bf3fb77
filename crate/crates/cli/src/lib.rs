//! Batch front end for stochastic dominance model ranking: table ingestion,
//! report generation and the synthetic power harness.

pub mod config;
pub mod error;
pub mod ingest;
pub mod report;
pub mod validate;

pub use config::{Aggregation, InputFormat, ModeChoice, OrderChoice, RunConfig};
pub use error::CliError;
pub use ingest::{apply_config, ingest, ingest_csv, ingest_json};
pub use report::{run, run_table, write_report, Report};
pub use validate::{power_csv, validate_gaussian, PowerRow, ValidationConfig};
