use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::ingest::ChannelStats;
use crate::model::{Channel, ComparisonResult};

use super::grid::GridMap;
use super::AnalysisError;

/// Channel statistics over the ok cells within a disc of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    pub center: (f64, f64),
    pub radius_m: f64,
    /// Cells of any status inside the disc.
    pub cells: usize,
    /// Cells with status ok inside the disc.
    pub ok_cells: usize,
    pub empty: bool,
    pub channels: IndexMap<String, ChannelStats>,
}

impl RegionSummary {
    pub fn channel(&self, c: Channel) -> ChannelStats {
        self.channels.get(c.name()).copied().unwrap_or_default()
    }
}

/// Summarizes cells whose horizontal distance to `center` is at most `radius_m`.
pub fn summarize_region(map: &GridMap, center: (f64, f64), radius_m: f64) -> Result<RegionSummary, AnalysisError> {
    if !(radius_m > 0.0 && radius_m.is_finite()) {
        return Err(AnalysisError::InvalidRadius(radius_m));
    }
    if !(center.0.is_finite() && center.1.is_finite()) {
        return Err(AnalysisError::InvalidCenter(center));
    }
    let inside: Vec<&ComparisonResult> = map
        .iter()
        .filter(|(ix, iy, _)| {
            let p = map.grid.position(*ix, *iy);
            (p.x - center.0).hypot(p.y - center.1) <= radius_m
        })
        .filter_map(|(_, _, c)| c)
        .collect();
    let ok_cells = inside.iter().filter(|r| r.is_ok()).count();
    let channels = Channel::ALL
        .iter()
        .map(|c| {
            let stats = ChannelStats::from_values(inside.iter().filter_map(|r| c.value(r)));
            (c.name().to_string(), stats)
        })
        .collect();
    Ok(RegionSummary {
        center,
        radius_m,
        cells: inside.len(),
        ok_cells,
        empty: ok_cells == 0,
        channels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ComparisonStatus, FeatureDistances, GridSpec, SetDistances};

    fn map() -> GridMap {
        let grid = GridSpec {
            origin_x: 0.0,
            origin_y: 0.0,
            nx: 4,
            ny: 4,
            dx: 1.0,
            dy: 1.0,
            height: 1.5,
        };
        let cells = (0..16)
            .map(|k| {
                Some(ComparisonResult {
                    rx_id: format!("c{k}"),
                    status: ComparisonStatus::Ok,
                    n_paths: (1, 1),
                    distances: Some(SetDistances {
                        hrt: k as f64,
                        crt: k as f64 / 2.0,
                        hrt_components: FeatureDistances::ZERO,
                        crt_components: FeatureDistances::ZERO,
                    }),
                })
            })
            .collect();
        GridMap { grid, cells }
    }

    #[test]
    fn small_radius_picks_single_cell() {
        let s = summarize_region(&map(), (2.0, 1.0), 0.4).unwrap();
        assert_eq!(s.ok_cells, 1);
        assert_eq!(s.channel(Channel::Hrt).mean, Some(6.0));
        assert_eq!(s.channel(Channel::Hrt).max, Some(6.0));
    }

    #[test]
    fn whole_grid_matches_global_summary() {
        let m = map();
        let s = summarize_region(&m, (1.5, 1.5), 100.0).unwrap();
        let g = m.summary();
        for c in Channel::ALL {
            assert_eq!(s.channel(c), g.channel(c));
        }
    }

    #[test]
    fn empty_region_and_bad_radius() {
        let s = summarize_region(&map(), (50.0, 50.0), 1.0).unwrap();
        assert!(s.empty);
        assert_eq!(s.channel(Channel::Crt).mean, None);
        assert!(summarize_region(&map(), (0.0, 0.0), 0.0).is_err());
        assert!(summarize_region(&map(), (0.0, 0.0), -1.0).is_err());
    }
}
