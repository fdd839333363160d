use std::path::Path;

use rayon::prelude::*;

use crate::ingest::{format_sig9, pair_datasets, summarize_results, write_csv, Dataset, IngestError, ResultSummary};
use crate::metrics::compare_path_sets;
use crate::model::{Channel, ComparisonResult, GridSpec, MetricConfig, ReceiverLayout};

use super::AnalysisError;

/// Status string for cells whose receiver is missing from a dataset.
pub const NO_DATA: &str = "no-data";

/// Per-cell comparison results over a receiver grid. `None` marks cells
/// whose receiver is absent from at least one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMap {
    pub grid: GridSpec,
    pub cells: Vec<Option<ComparisonResult>>,
}

impl GridMap {
    pub fn cell(&self, ix: usize, iy: usize) -> Option<&ComparisonResult> {
        self.cells[self.grid.index(ix, iy)].as_ref()
    }

    /// Channel value of a cell; `None` for no-data and non-ok cells.
    pub fn value(&self, ix: usize, iy: usize, channel: Channel) -> Option<f64> {
        self.cell(ix, iy).and_then(|r| channel.value(r))
    }

    /// Iterates `(ix, iy, cell)` in row-major order, x fastest.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Option<&ComparisonResult>)> + '_ {
        let nx = self.grid.nx;
        self.cells
            .iter()
            .enumerate()
            .map(move |(k, c)| (k % nx, k / nx, c.as_ref()))
    }

    pub fn results(&self) -> impl Iterator<Item = &ComparisonResult> + Clone {
        self.cells.iter().flatten()
    }

    pub fn summary(&self) -> ResultSummary {
        summarize_results(self.results())
    }

    pub fn header() -> Vec<&'static str> {
        let mut h = vec!["ix", "iy", "x_m", "y_m", "status"];
        h.extend(Channel::ALL.iter().map(|c| c.name()));
        h
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), IngestError> {
        let rows: Vec<Vec<String>> = self
            .iter()
            .map(|(ix, iy, cell)| {
                let p = self.grid.position(ix, iy);
                let mut row = vec![ix.to_string(), iy.to_string(), format_sig9(p.x), format_sig9(p.y)];
                match cell {
                    Some(r) => {
                        row.push(r.status.to_string());
                        row.extend(crate::ingest::channel_cells(r));
                    }
                    None => {
                        row.push(NO_DATA.to_string());
                        row.extend(std::iter::repeat_n(String::new(), Channel::ALL.len()));
                    }
                }
                row
            })
            .collect();
        write_csv(path, &Self::header(), &rows)
    }
}

fn grid_of(d: &Dataset) -> Option<GridSpec> {
    match d.metadata.layout {
        Some(ReceiverLayout::Grid(g)) => Some(g),
        _ => None,
    }
}

/// Compares two datasets that share a grid layout, cell by cell.
pub fn compare_grid(a: &Dataset, b: &Dataset, cfg: &MetricConfig) -> Result<GridMap, AnalysisError> {
    cfg.validate()?;
    let ga = grid_of(a).ok_or_else(|| AnalysisError::NotAGrid(a.label().to_string()))?;
    let gb = grid_of(b).ok_or_else(|| AnalysisError::NotAGrid(b.label().to_string()))?;
    if ga != gb {
        return Err(AnalysisError::LayoutMismatch(format!("{ga:?} vs {gb:?}")));
    }
    // position agreement for shared receivers
    pair_datasets(a, b)?;
    let ids: Vec<String> = (0..ga.ny)
        .flat_map(|iy| (0..ga.nx).map(move |ix| GridSpec::rx_id(ix, iy)))
        .collect();
    let cells = ids
        .par_iter()
        .map(|id| match (a.get(id), b.get(id)) {
            (Some(ea), Some(eb)) => Some(compare_path_sets(&ea.paths, &eb.paths, cfg)),
            _ => None,
        })
        .collect();
    Ok(GridMap { grid: ga, cells })
}
