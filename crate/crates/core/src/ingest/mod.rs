//! Dataset files: loading, writing and pairing of two simulations.

mod csvio;
mod dataset;
mod numfmt;
mod results;

pub use csvio::{
    load_dataset_dir, load_rayset_csv, write_dataset_dir, LoadOptions, METADATA_FILE,
    POSITIONS_FILE, POSITIONS_HEADER, RAYS_FILE, RAYS_HEADER, TIME_COLUMN,
};
pub(crate) use csvio::write_csv;
pub use dataset::{pair_datasets, Dataset, DatasetMetadata, Pairing, ReceiverEntry, POSITION_TOLERANCE_M};
pub use numfmt::format_sig9;
pub(crate) use results::{channel_cells, write_json};
pub use results::{
    read_results, results_header, summarize_results, write_results, ChannelStats, ResultRow,
    ResultSummary, RESULTS_FILE, SUMMARY_FILE,
};

use std::path::PathBuf;
use thiserror::Error;

use crate::model::ValidationError;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: malformed header: {message}")]
    MalformedHeader { path: PathBuf, message: String },
    #[error("{path}, line {line}, column {column}: cannot parse {value:?} as a number")]
    BadField {
        path: PathBuf,
        line: u64,
        column: String,
        value: String,
    },
    #[error("{path}, line {line}: receiver {rx_id:?} is not listed in the positions file")]
    UnknownRxId { path: PathBuf, line: u64, rx_id: String },
    #[error("{path}, line {line}: receiver {rx_id:?} repeats path_id {path_id}")]
    DuplicatePathId {
        path: PathBuf,
        line: u64,
        rx_id: String,
        path_id: u64,
    },
    #[error("receiver {rx_id:?} is {offset_m} m apart in the two datasets")]
    PositionMismatch { rx_id: String, offset_m: f64 },
    #[error("{path}: {message}")]
    Layout { path: PathBuf, message: String },
    #[error(transparent)]
    Validation(#[from] ValidationError),
}
