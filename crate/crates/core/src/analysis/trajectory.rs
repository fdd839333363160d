use std::path::Path;

use rayon::prelude::*;

use crate::ingest::{format_sig9, pair_datasets, summarize_results, write_csv, Dataset, IngestError, ResultSummary};
use crate::metrics::compare_path_sets;
use crate::model::{Channel, ComparisonResult, MetricConfig, Vec3};

use super::AnalysisError;

/// Two datasets may disagree on a step's timestamp by at most this much.
pub const TIME_TOLERANCE_S: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStep {
    pub t: f64,
    pub position: Vec3,
    pub result: ComparisonResult,
}

/// Comparison results along a trajectory, ordered by time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectorySeries {
    pub steps: Vec<TrajectoryStep>,
    /// Step ids present in only one of the datasets.
    pub excluded: Vec<String>,
}

impl TrajectorySeries {
    /// `(t, value)` samples of one channel; non-ok steps are skipped.
    pub fn series(&self, channel: Channel) -> Vec<(f64, f64)> {
        self.steps
            .iter()
            .filter_map(|s| channel.value(&s.result).map(|v| (s.t, v)))
            .collect()
    }

    pub fn summary(&self) -> ResultSummary {
        let mut s = summarize_results(self.steps.iter().map(|s| &s.result).collect::<Vec<_>>());
        s.only_in_a = self.excluded.clone();
        s
    }

    pub fn header() -> Vec<&'static str> {
        let mut h = vec!["t_s", "rx_id", "x_m", "y_m", "z_m", "status"];
        h.extend(Channel::ALL.iter().map(|c| c.name()));
        h
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), IngestError> {
        let rows: Vec<Vec<String>> = self
            .steps
            .iter()
            .map(|s| {
                let mut row = vec![
                    format_sig9(s.t),
                    s.result.rx_id.clone(),
                    format_sig9(s.position.x),
                    format_sig9(s.position.y),
                    format_sig9(s.position.z),
                    s.result.status.to_string(),
                ];
                row.extend(crate::ingest::channel_cells(&s.result));
                row
            })
            .collect();
        write_csv(path, &Self::header(), &rows)
    }
}

/// Compares two trajectory datasets step by step. Steps missing from either
/// side are left out and listed in `excluded`.
pub fn compare_trajectory(a: &Dataset, b: &Dataset, cfg: &MetricConfig) -> Result<TrajectorySeries, AnalysisError> {
    cfg.validate()?;
    for d in [a, b] {
        if let Some((id, _)) = d.receivers.iter().find(|(_, e)| e.t.is_none()) {
            return Err(AnalysisError::MissingTimestamp {
                dataset: d.label().to_string(),
                rx_id: id.clone(),
            });
        }
    }
    let pairing = pair_datasets(a, b)?;
    let mut excluded = pairing.only_in_a;
    excluded.extend(pairing.only_in_b);

    let mut shared = Vec::with_capacity(pairing.pairs.len());
    for (id, _, _) in &pairing.pairs {
        let (ea, eb) = (&a.receivers[id], &b.receivers[id]);
        let (ta, tb) = (ea.t.unwrap_or_default(), eb.t.unwrap_or_default());
        if (ta - tb).abs() > TIME_TOLERANCE_S {
            return Err(AnalysisError::TimeMismatch {
                rx_id: id.clone(),
                t_a: ta,
                t_b: tb,
            });
        }
        shared.push((id, ta, ea.position));
    }
    shared.sort_by(|x, y| x.1.total_cmp(&y.1));

    let steps = shared
        .par_iter()
        .map(|(id, t, position)| TrajectoryStep {
            t: *t,
            position: *position,
            result: compare_path_sets(&a.receivers[*id].paths, &b.receivers[*id].paths, cfg),
        })
        .collect();
    Ok(TrajectorySeries { steps, excluded })
}
