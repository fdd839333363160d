//! Domain types shared by the metric, tracing, ingestion and analysis layers.
//!
//! Angles are carried in degrees everywhere outside of trigonometric
//! evaluation. Azimuth is measured counterclockwise from the +x axis in the
//! horizontal plane, elevation from the horizontal plane with +90 at zenith.
//! Delays are seconds in memory and nanoseconds in files.

mod channel;
mod config;
mod layout;
mod vec3;

pub use channel::Channel;
pub use config::{AssignmentMode, HrtComponentMode, MetricConfig, StandardizationScope, Weights};
pub use layout::{GridSpec, Receiver, ReceiverLayout, TrajectoryPoint};
pub use vec3::Vec3;

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValidationError {
    #[error("receiver {rx_id}, path {index}: field {field} is not finite")]
    NonFinite {
        rx_id: String,
        index: usize,
        field: &'static str,
    },
    #[error("receiver {rx_id}, path {index}: {field} = {value} is outside [-90, 90] degrees")]
    ElevationOutOfRange {
        rx_id: String,
        index: usize,
        field: &'static str,
        value: f64,
    },
    #[error("receiver {rx_id}, path {index}: negative delay {value} s")]
    NegativeDelay {
        rx_id: String,
        index: usize,
        value: f64,
    },
    #[error("duplicate receiver id {0}")]
    DuplicateRxId(String),
    #[error("invalid layout: {0}")]
    Layout(String),
    #[error("invalid metric configuration: {0}")]
    Config(String),
}

/// One propagation path: received power, delay, departure and arrival directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathTuple {
    pub power_dbm: f64,
    pub delay_s: f64,
    pub dod_az: f64,
    pub dod_el: f64,
    pub doa_az: f64,
    pub doa_el: f64,
}

impl PathTuple {
    pub fn new(power_dbm: f64, delay_s: f64, dod: (f64, f64), doa: (f64, f64)) -> Self {
        Self {
            power_dbm,
            delay_s,
            dod_az: dod.0,
            dod_el: dod.1,
            doa_az: doa.0,
            doa_el: doa.1,
        }
    }

    fn fields(&self) -> [(&'static str, f64); 6] {
        [
            ("power_dbm", self.power_dbm),
            ("delay_s", self.delay_s),
            ("dod_az", self.dod_az),
            ("dod_el", self.dod_el),
            ("doa_az", self.doa_az),
            ("doa_el", self.doa_el),
        ]
    }
}

/// All paths between the transmitter and one receiver in one simulation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PathSet {
    pub rx_id: String,
    pub paths: Vec<PathTuple>,
}

impl PathSet {
    pub fn new(rx_id: impl Into<String>, paths: Vec<PathTuple>) -> Self {
        Self {
            rx_id: rx_id.into(),
            paths,
        }
    }

    pub fn empty(rx_id: impl Into<String>) -> Self {
        Self::new(rx_id, Vec::new())
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Keeps only paths at or above `threshold_dbm`, preserving order.
    pub fn filtered_by_power(&self, threshold_dbm: f64) -> PathSet {
        PathSet {
            rx_id: self.rx_id.clone(),
            paths: self
                .paths
                .iter()
                .filter(|p| p.power_dbm >= threshold_dbm)
                .copied()
                .collect(),
        }
    }
}

/// Wraps an azimuth into [-180, 180). Values already in range are returned
/// untouched so that normalization is idempotent bit-for-bit.
pub fn normalize_azimuth(az: f64) -> f64 {
    if (-180.0..180.0).contains(&az) {
        return az;
    }
    let wrapped = (az + 180.0).rem_euclid(360.0) - 180.0;
    if wrapped >= 180.0 {
        wrapped - 360.0
    } else if wrapped < -180.0 {
        wrapped + 360.0
    } else {
        wrapped
    }
}

/// Checks every path of `raw` and returns the normalized set.
pub fn validate_path_set(raw: PathSet) -> Result<PathSet, ValidationError> {
    let PathSet { rx_id, paths } = raw;
    let mut out = Vec::with_capacity(paths.len());
    for (index, p) in paths.into_iter().enumerate() {
        for (field, value) in p.fields() {
            if !value.is_finite() {
                return Err(ValidationError::NonFinite {
                    rx_id,
                    index,
                    field,
                });
            }
        }
        for (field, value) in [("dod_el", p.dod_el), ("doa_el", p.doa_el)] {
            if !(-90.0..=90.0).contains(&value) {
                return Err(ValidationError::ElevationOutOfRange {
                    rx_id,
                    index,
                    field,
                    value,
                });
            }
        }
        if p.delay_s < 0.0 {
            return Err(ValidationError::NegativeDelay {
                rx_id,
                index,
                value: p.delay_s,
            });
        }
        out.push(PathTuple {
            dod_az: normalize_azimuth(p.dod_az),
            doa_az: normalize_azimuth(p.doa_az),
            ..p
        });
    }
    Ok(PathSet { rx_id, paths: out })
}

/// Validates a collection of path sets that belong to the same dataset,
/// rejecting repeated receiver ids.
pub fn validate_dataset_sets(
    sets: impl IntoIterator<Item = PathSet>,
) -> Result<Vec<PathSet>, ValidationError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for set in sets {
        if !seen.insert(set.rx_id.clone()) {
            return Err(ValidationError::DuplicateRxId(set.rx_id));
        }
        out.push(validate_path_set(set)?);
    }
    Ok(out)
}

/// Population mean and standard deviation of power (dBm) and delay (s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub mu_p: f64,
    pub sigma_p: f64,
    pub mu_tau: f64,
    pub sigma_tau: f64,
}

/// Per-feature distances between two standardized tuples, or aggregates of them.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureDistances {
    pub d_tau: f64,
    pub d_p: f64,
    pub d_dod: f64,
    pub d_doa: f64,
}

impl FeatureDistances {
    pub const ZERO: FeatureDistances = FeatureDistances {
        d_tau: 0.0,
        d_p: 0.0,
        d_dod: 0.0,
        d_doa: 0.0,
    };

    pub fn as_array(&self) -> [f64; 4] {
        [self.d_tau, self.d_p, self.d_dod, self.d_doa]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self {
            d_tau: a[0],
            d_p: a[1],
            d_dod: a[2],
            d_doa: a[3],
        }
    }

    /// (DoD, DoA) cosine components converted to great-circle angles in degrees.
    pub fn angles_deg(&self) -> (f64, f64) {
        (cosine_distance_to_deg(self.d_dod), cosine_distance_to_deg(self.d_doa))
    }
}

/// arccos(1 - c) in degrees, for a cosine distance c in [0, 2].
pub fn cosine_distance_to_deg(c: f64) -> f64 {
    (1.0 - c).clamp(-1.0, 1.0).acos().to_degrees()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComparisonStatus {
    Ok,
    BothEmpty,
    CoverageMismatch,
}

impl ComparisonStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            ComparisonStatus::Ok => "ok",
            ComparisonStatus::BothEmpty => "both-empty",
            ComparisonStatus::CoverageMismatch => "coverage-mismatch",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ok" => Some(ComparisonStatus::Ok),
            "both-empty" => Some(ComparisonStatus::BothEmpty),
            "coverage-mismatch" => Some(ComparisonStatus::CoverageMismatch),
            _ => None,
        }
    }
}

impl std::fmt::Display for ComparisonStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// HRT and CRT values with their per-feature components.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SetDistances {
    pub hrt: f64,
    pub crt: f64,
    pub hrt_components: FeatureDistances,
    pub crt_components: FeatureDistances,
}

impl SetDistances {
    pub const ZERO: SetDistances = SetDistances {
        hrt: 0.0,
        crt: 0.0,
        hrt_components: FeatureDistances::ZERO,
        crt_components: FeatureDistances::ZERO,
    };

    pub fn hrt_angles_deg(&self) -> (f64, f64) {
        self.hrt_components.angles_deg()
    }

    pub fn crt_angles_deg(&self) -> (f64, f64) {
        self.crt_components.angles_deg()
    }
}

/// Outcome of comparing the two path sets of one receiver.
///
/// `distances` is `None` only for coverage mismatches; both-empty receivers
/// carry all-zero distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub rx_id: String,
    pub status: ComparisonStatus,
    pub n_paths: (usize, usize),
    pub distances: Option<SetDistances>,
}

impl ComparisonResult {
    pub fn is_ok(&self) -> bool {
        self.status == ComparisonStatus::Ok
    }

    pub fn hrt(&self) -> Option<f64> {
        self.distances.map(|d| d.hrt)
    }

    pub fn crt(&self) -> Option<f64> {
        self.distances.map(|d| d.crt)
    }
}
