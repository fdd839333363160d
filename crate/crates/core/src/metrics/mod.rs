//! Standardization, per-feature distances, nearest-neighbor assignment and
//! the Hausdorff-RT / Chamfer-RT set distances.

mod distance;
mod nn;
mod set_distance;
mod standardize;

pub use distance::{angular_distance, composite_distance, direction_unit_vector, feature_distances};
pub use nn::{
    nearest_neighbor_assign, nearest_neighbor_assign_with, AssignedPair, Direction, KdTree,
    NnAssignment, NnStrategy, KD_TREE_MIN_TARGETS,
};
pub use set_distance::{chamfer_rt, compare_path_sets, hausdorff_rt, BidirectionalAssignment, RtDistance};
pub use standardize::{compute_standardization, standardize, StandardizedTuple, SIGMA_GUARD};

use crate::model::ComparisonStatus;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("nearest-neighbor target set is empty")]
    EmptyTarget,
    #[error("set distance undefined: {0}")]
    Degenerate(ComparisonStatus),
}
