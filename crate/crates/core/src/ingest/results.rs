use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::model::{Channel, ComparisonResult, ComparisonStatus, ReceiverLayout, Vec3};

use super::csvio::write_csv;
use super::numfmt::format_sig9;
use super::IngestError;

pub const RESULTS_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.json";

/// Mean and maximum of one channel over the receivers with status ok.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ChannelStats {
    pub count: usize,
    pub mean: Option<f64>,
    pub max: Option<f64>,
}

impl ChannelStats {
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Self {
        let mut count = 0;
        let mut sum = 0.0;
        let mut max = f64::NEG_INFINITY;
        for v in values {
            count += 1;
            sum += v;
            max = max.max(v);
        }
        if count == 0 {
            return Self::default();
        }
        Self {
            count,
            mean: Some(sum / count as f64),
            max: Some(max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ResultSummary {
    pub receivers: usize,
    pub status_counts: BTreeMap<String, usize>,
    pub channels: IndexMap<String, ChannelStats>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub only_in_a: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub only_in_b: Vec<String>,
}

impl ResultSummary {
    pub fn channel(&self, c: Channel) -> ChannelStats {
        self.channels.get(c.name()).copied().unwrap_or_default()
    }
}

/// Counts by status and per-channel statistics over ok receivers.
pub fn summarize_results<'a>(results: impl IntoIterator<Item = &'a ComparisonResult> + Clone) -> ResultSummary {
    let mut status_counts: BTreeMap<String, usize> = [
        ComparisonStatus::Ok,
        ComparisonStatus::BothEmpty,
        ComparisonStatus::CoverageMismatch,
    ]
    .iter()
    .map(|s| (s.as_str().to_string(), 0))
    .collect();
    let mut receivers = 0;
    for r in results.clone() {
        receivers += 1;
        *status_counts.entry(r.status.as_str().to_string()).or_default() += 1;
    }
    let channels = Channel::ALL
        .iter()
        .map(|c| {
            let stats = ChannelStats::from_values(results.clone().into_iter().filter_map(|r| c.value(r)));
            (c.name().to_string(), stats)
        })
        .collect();
    ResultSummary {
        receivers,
        status_counts,
        channels,
        only_in_a: Vec::new(),
        only_in_b: Vec::new(),
    }
}

pub fn results_header() -> Vec<&'static str> {
    let mut h = vec!["rx_id", "x_m", "y_m", "z_m", "status", "n_paths_a", "n_paths_b"];
    h.extend(Channel::ALL.iter().map(|c| c.name()));
    h
}

pub(crate) fn channel_cells(r: &ComparisonResult) -> Vec<String> {
    Channel::values(r)
        .iter()
        .map(|v| v.map(format_sig9).unwrap_or_default())
        .collect()
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IngestError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable summary");
    text.push('\n');
    fs::write(path, text).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `results.csv` (one row per receiver) and `summary.json` into `dir`.
/// Non-ok receivers have empty channel cells.
pub fn write_results(
    results: &[ComparisonResult],
    layout: &ReceiverLayout,
    dir: &Path,
    summary: &ResultSummary,
) -> Result<Vec<PathBuf>, IngestError> {
    fs::create_dir_all(dir).map_err(|source| IngestError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let positions: HashMap<String, Vec3> = layout
        .receivers()
        .into_iter()
        .map(|r| (r.rx_id, r.position))
        .collect();
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            let (x, y, z) = match positions.get(&r.rx_id) {
                Some(p) => (format_sig9(p.x), format_sig9(p.y), format_sig9(p.z)),
                None => Default::default(),
            };
            let mut row = vec![
                r.rx_id.clone(),
                x,
                y,
                z,
                r.status.to_string(),
                r.n_paths.0.to_string(),
                r.n_paths.1.to_string(),
            ];
            row.extend(channel_cells(r));
            row
        })
        .collect();
    let csv_path = dir.join(RESULTS_FILE);
    let json_path = dir.join(SUMMARY_FILE);
    write_csv(&csv_path, &results_header(), &rows)?;
    write_json(&json_path, summary)?;
    Ok(vec![csv_path, json_path])
}

/// One parsed row of `results.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub rx_id: String,
    pub position: Option<Vec3>,
    pub status: ComparisonStatus,
    pub n_paths: (usize, usize),
    pub channels: [Option<f64>; 10],
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>, IngestError> {
    let csv_err = |source| IngestError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != results_header() {
        return Err(IngestError::MalformedHeader {
            path: path.to_path_buf(),
            message: "not a results file".into(),
        });
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let bad = |col: usize| IngestError::BadField {
            path: path.to_path_buf(),
            line,
            column: header[col].to_string(),
            value: rec[col].to_string(),
        };
        let opt_num = |col: usize| -> Result<Option<f64>, IngestError> {
            if rec[col].is_empty() {
                Ok(None)
            } else {
                rec[col].parse().map(Some).map_err(|_| bad(col))
            }
        };
        let position = match (opt_num(1)?, opt_num(2)?, opt_num(3)?) {
            (Some(x), Some(y), Some(z)) => Some(Vec3::new(x, y, z)),
            _ => None,
        };
        let status = ComparisonStatus::parse(&rec[4]).ok_or_else(|| bad(4))?;
        let n_a = rec[5].parse().map_err(|_| bad(5))?;
        let n_b = rec[6].parse().map_err(|_| bad(6))?;
        let mut channels = [None; 10];
        for (k, slot) in channels.iter_mut().enumerate() {
            *slot = opt_num(7 + k)?;
        }
        out.push(ResultRow {
            rx_id: rec[0].to_string(),
            position,
            status,
            n_paths: (n_a, n_b),
            channels,
        });
    }
    Ok(out)
}
