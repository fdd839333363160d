use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::model::{validate_path_set, PathSet, ReceiverLayout, ValidationError, Vec3};

use super::IngestError;

/// Shared receivers whose positions differ by more than this are not the
/// same receiver.
pub const POSITION_TOLERANCE_M: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetMetadata {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frequency_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tx_position: Option<Vec3>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layout: Option<ReceiverLayout>,
    /// Receivers that were not simulated, e.g. because they fall inside a
    /// building.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flagged_receivers: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverEntry {
    pub position: Vec3,
    /// Sample time, present for trajectory datasets.
    pub t: Option<f64>,
    pub paths: PathSet,
}

/// One simulation: every receiver with its position and path set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub metadata: DatasetMetadata,
    pub receivers: IndexMap<String, ReceiverEntry>,
}

impl Dataset {
    pub fn new(metadata: DatasetMetadata) -> Self {
        Self {
            metadata,
            receivers: IndexMap::new(),
        }
    }

    pub fn label(&self) -> &str {
        &self.metadata.label
    }

    /// Adds a receiver after validating its path set. The path set's id is
    /// overwritten with `rx_id`.
    pub fn insert(
        &mut self,
        rx_id: impl Into<String>,
        position: Vec3,
        t: Option<f64>,
        mut paths: PathSet,
    ) -> Result<(), IngestError> {
        let rx_id = rx_id.into();
        if self.receivers.contains_key(&rx_id) {
            return Err(ValidationError::DuplicateRxId(rx_id).into());
        }
        paths.rx_id = rx_id.clone();
        let paths = validate_path_set(paths)?;
        self.receivers.insert(
            rx_id,
            ReceiverEntry {
                position,
                t,
                paths,
            },
        );
        Ok(())
    }

    pub fn get(&self, rx_id: &str) -> Option<&ReceiverEntry> {
        self.receivers.get(rx_id)
    }

    pub fn len(&self) -> usize {
        self.receivers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.receivers.is_empty()
    }

    pub fn is_trajectory(&self) -> bool {
        matches!(self.metadata.layout, Some(ReceiverLayout::Trajectory { .. }))
            || (!self.receivers.is_empty() && self.receivers.values().all(|r| r.t.is_some()))
    }
}

/// Receivers matched by id across two datasets.
#[derive(Debug, Clone, PartialEq)]
pub struct Pairing {
    /// (rx_id, path set in a, path set in b), in the receiver order of a.
    pub pairs: Vec<(String, PathSet, PathSet)>,
    pub only_in_a: Vec<String>,
    pub only_in_b: Vec<String>,
}

/// Inner join on receiver id. Receivers present on one side only are listed,
/// never dropped silently.
pub fn pair_datasets(a: &Dataset, b: &Dataset) -> Result<Pairing, IngestError> {
    let mut pairs = Vec::new();
    let mut only_in_a = Vec::new();
    for (id, ea) in &a.receivers {
        match b.receivers.get(id) {
            Some(eb) => {
                let offset = ea.position.distance(eb.position);
                if !(offset <= POSITION_TOLERANCE_M) {
                    return Err(IngestError::PositionMismatch {
                        rx_id: id.clone(),
                        offset_m: offset,
                    });
                }
                pairs.push((id.clone(), ea.paths.clone(), eb.paths.clone()));
            }
            None => only_in_a.push(id.clone()),
        }
    }
    let only_in_b = b
        .receivers
        .keys()
        .filter(|id| !a.receivers.contains_key(*id))
        .cloned()
        .collect();
    Ok(Pairing {
        pairs,
        only_in_a,
        only_in_b,
    })
}
