//! End-to-end orchestration: CSV ingestion, sampling-rate simulation,
//! chronological splits, stream replay and report emission.

mod config;
mod ingest;
mod matrix;
mod pattern_io;
mod resample;
mod session;
pub mod synthetic;

pub use config::Settings;
pub use ingest::{ingest_csv, ingest_reader, ColumnSpec, IngestedStream};
pub use matrix::{run_matrix, CellReport, MatrixReport, MatrixSpec, RepRow, StatPair};
pub use pattern_io::{pattern_to_csv, PatternFile, PATTERN_FORMAT, PATTERN_VERSION};
pub use resample::{resample, split_chronological, Standardizer, RateMode};
pub use session::{
    fit_from_spec, run_from_spec, run_on_stream, run_session, QueryLogEntry, RunConfig, RunReport,
    SessionOutcome, StreamSpec, REPORT_VERSION,
};

use thiserror::Error;

use crate::classifier::ClassifierError;
use crate::clpc::FitError;
use crate::sampling::SamplingError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: cannot parse `{value}` in column `{column}`")]
    ParseError {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}: time does not increase")]
    NonMonotoneTime { row: usize },
    #[error("test sample {index} has no label")]
    MissingLabel { index: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("stream has too few samples for the requested split ({0})")]
    EmptySplit(String),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
}
