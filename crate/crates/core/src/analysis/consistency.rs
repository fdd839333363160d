use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ingest::{format_sig9, write_csv, Dataset, IngestError};
use crate::metrics::{BidirectionalAssignment, MetricError};
use crate::model::{ComparisonStatus, MetricConfig, PathSet, Vec3};

use super::AnalysisError;

/// Neighbor statistics for one receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyEntry {
    pub rx_id: String,
    pub position: Vec3,
    /// Receivers strictly within the radius, excluding itself.
    pub neighbors: usize,
    /// Neighbors whose comparison had a defined CRT.
    pub compared: usize,
    /// Neighbors where exactly one of the two path sets was empty.
    pub coverage_mismatches: usize,
    pub mean_crt: Option<f64>,
}

impl ConsistencyEntry {
    pub fn is_isolated(&self) -> bool {
        self.neighbors == 0
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub radius_m: f64,
    pub entries: Vec<ConsistencyEntry>,
    /// Unordered receiver pairs that were compared.
    pub pairs_compared: usize,
}

impl ConsistencyReport {
    pub fn isolated(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.is_isolated())
            .map(|e| e.rx_id.as_str())
            .collect()
    }

    pub fn entry(&self, rx_id: &str) -> Option<&ConsistencyEntry> {
        self.entries.iter().find(|e| e.rx_id == rx_id)
    }

    pub fn header() -> Vec<&'static str> {
        vec!["rx_id", "x_m", "y_m", "z_m", "neighbors", "compared", "coverage_mismatches", "mean_crt"]
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), IngestError> {
        let rows: Vec<Vec<String>> = self
            .entries
            .iter()
            .map(|e| {
                vec![
                    e.rx_id.clone(),
                    format_sig9(e.position.x),
                    format_sig9(e.position.y),
                    format_sig9(e.position.z),
                    e.neighbors.to_string(),
                    e.compared.to_string(),
                    e.coverage_mismatches.to_string(),
                    e.mean_crt.map(format_sig9).unwrap_or_default(),
                ]
            })
            .collect();
        write_csv(path, &Self::header(), &rows)
    }
}

/// CRT between two receivers of the same dataset. Two empty sets count as
/// identical; one empty set gives `None`.
fn neighbor_crt(x: &PathSet, y: &PathSet, cfg: &MetricConfig) -> Option<f64> {
    match BidirectionalAssignment::compute(x, y, cfg) {
        Ok(b) => Some(b.chamfer().value),
        Err(MetricError::Degenerate(ComparisonStatus::BothEmpty)) => Some(0.0),
        Err(_) => None,
    }
}

/// Index pairs `(i, j)`, `i < j`, with horizontal separation below `radius`.
fn neighbor_pairs(positions: &[Vec3], radius: f64) -> Vec<(usize, usize)> {
    let key = |p: &Vec3| ((p.x / radius).floor() as i64, (p.y / radius).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in positions.iter().enumerate() {
        buckets.entry(key(p)).or_default().push(i);
    }
    let mut pairs = Vec::new();
    for (i, p) in positions.iter().enumerate() {
        let (kx, ky) = key(p);
        for bx in kx.saturating_sub(1)..=kx.saturating_add(1) {
            for by in ky.saturating_sub(1)..=ky.saturating_add(1) {
                let Some(bucket) = buckets.get(&(bx, by)) else { continue };
                for &j in bucket {
                    if j > i && p.horizontal_distance(positions[j]) < radius {
                        pairs.push((i, j));
                    }
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

/// For every receiver, the mean CRT to the receivers within `radius_m`
/// (horizontal distance, strict) of the same dataset.
pub fn spatial_consistency(
    dataset: &Dataset,
    radius_m: f64,
    cfg: &MetricConfig,
) -> Result<ConsistencyReport, AnalysisError> {
    if !(radius_m > 0.0 && radius_m.is_finite()) {
        return Err(AnalysisError::InvalidRadius(radius_m));
    }
    cfg.validate()?;
    let entries: Vec<_> = dataset.receivers.iter().collect();
    let positions: Vec<Vec3> = entries.iter().map(|(_, e)| e.position).collect();
    let pairs = neighbor_pairs(&positions, radius_m);
    let crts: Vec<Option<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| neighbor_crt(&entries[i].1.paths, &entries[j].1.paths, cfg))
        .collect();

    let n = entries.len();
    let mut neighbors = vec![0usize; n];
    let mut compared = vec![0usize; n];
    let mut sums = vec![0.0f64; n];
    for (&(i, j), crt) in pairs.iter().zip(&crts) {
        neighbors[i] += 1;
        neighbors[j] += 1;
        if let Some(v) = crt {
            compared[i] += 1;
            compared[j] += 1;
            sums[i] += v;
            sums[j] += v;
        }
    }
    let entries = entries
        .iter()
        .enumerate()
        .map(|(k, (id, e))| ConsistencyEntry {
            rx_id: (*id).clone(),
            position: e.position,
            neighbors: neighbors[k],
            compared: compared[k],
            coverage_mismatches: neighbors[k] - compared[k],
            mean_crt: (compared[k] > 0).then(|| sums[k] / compared[k] as f64),
        })
        .collect();
    Ok(ConsistencyReport {
        radius_m,
        entries,
        pairs_compared: pairs.len(),
    })
}
