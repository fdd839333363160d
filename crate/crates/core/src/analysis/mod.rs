//! Spatial and temporal views over per-receiver comparisons.

mod consistency;
mod grid;
mod region;
mod trajectory;

pub use consistency::{spatial_consistency, ConsistencyEntry, ConsistencyReport};
pub use grid::{compare_grid, GridMap, NO_DATA};
pub use region::{summarize_region, RegionSummary};
pub use trajectory::{compare_trajectory, TrajectorySeries, TrajectoryStep, TIME_TOLERANCE_S};

use thiserror::Error;

use crate::ingest::IngestError;
use crate::model::ValidationError;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("dataset {0:?} has no grid layout")]
    NotAGrid(String),
    #[error("grid layouts differ: {0}")]
    LayoutMismatch(String),
    #[error("dataset {dataset:?}: receiver {rx_id:?} has no timestamp")]
    MissingTimestamp { dataset: String, rx_id: String },
    #[error("step {rx_id:?} has time {t_a} s in one dataset and {t_b} s in the other")]
    TimeMismatch { rx_id: String, t_a: f64, t_b: f64 },
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("region center must be finite, got {0:?}")]
    InvalidCenter((f64, f64)),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
}
