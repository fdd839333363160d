use serde::{Deserialize, Serialize};

use super::{ValidationError, Vec3};

/// Regular receiver grid at a fixed height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin_x: f64,
    pub origin_y: f64,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub height: f64,
}

impl GridSpec {
    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn position(&self, ix: usize, iy: usize) -> Vec3 {
        Vec3::new(
            self.origin_x + ix as f64 * self.dx,
            self.origin_y + iy as f64 * self.dy,
            self.height,
        )
    }

    pub fn rx_id(ix: usize, iy: usize) -> String {
        format!("g{ix}_{iy}")
    }

    /// Inverse of [`GridSpec::rx_id`].
    pub fn parse_rx_id(id: &str) -> Option<(usize, usize)> {
        let (ix, iy) = id.strip_prefix('g')?.split_once('_')?;
        Some((ix.parse().ok()?, iy.parse().ok()?))
    }

    /// Row-major cell index, x fastest.
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub rx_id: String,
    pub t: f64,
    pub position: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Receiver {
    pub rx_id: String,
    pub position: Vec3,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

/// Where the receivers of a simulation are placed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ReceiverLayout {
    Grid(GridSpec),
    Trajectory { points: Vec<TrajectoryPoint> },
    Explicit { receivers: Vec<Receiver> },
}

impl ReceiverLayout {
    /// Builds a trajectory layout from `(t, position)` samples, naming the
    /// steps `s0`, `s1`, ...
    pub fn trajectory_from_samples(samples: &[(f64, Vec3)]) -> Self {
        ReceiverLayout::Trajectory {
            points: samples
                .iter()
                .enumerate()
                .map(|(k, (t, position))| TrajectoryPoint {
                    rx_id: format!("s{k}"),
                    t: *t,
                    position: *position,
                })
                .collect(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ReceiverLayout::Grid(_) => "grid",
            ReceiverLayout::Trajectory { .. } => "trajectory",
            ReceiverLayout::Explicit { .. } => "explicit",
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        match self {
            ReceiverLayout::Grid(g) => {
                if g.nx == 0 || g.ny == 0 {
                    return Err(ValidationError::Layout("grid needs nx, ny >= 1".into()));
                }
                if !(g.dx > 0.0 && g.dy > 0.0) || !g.dx.is_finite() || !g.dy.is_finite() {
                    return Err(ValidationError::Layout("grid spacing must be positive".into()));
                }
                if ![g.origin_x, g.origin_y, g.height].iter().all(|v| v.is_finite()) {
                    return Err(ValidationError::Layout("grid origin must be finite".into()));
                }
            }
            ReceiverLayout::Trajectory { points } => {
                for w in points.windows(2) {
                    if w[1].t <= w[0].t || w[1].t.is_nan() {
                        return Err(ValidationError::Layout(format!(
                            "trajectory timestamps must be strictly increasing ({} then {})",
                            w[0].t, w[1].t
                        )));
                    }
                }
                if points.iter().any(|p| !p.t.is_finite() || !p.position.is_finite()) {
                    return Err(ValidationError::Layout("non-finite trajectory sample".into()));
                }
                check_unique(points.iter().map(|p| p.rx_id.as_str()))?;
            }
            ReceiverLayout::Explicit { receivers } => {
                if receivers.iter().any(|r| !r.position.is_finite()) {
                    return Err(ValidationError::Layout("non-finite receiver position".into()));
                }
                check_unique(receivers.iter().map(|r| r.rx_id.as_str()))?;
            }
        }
        Ok(())
    }

    /// All receivers in layout order (grid: row-major, x fastest).
    pub fn receivers(&self) -> Vec<Receiver> {
        match self {
            ReceiverLayout::Grid(g) => {
                let mut out = Vec::with_capacity(g.cell_count());
                for iy in 0..g.ny {
                    for ix in 0..g.nx {
                        out.push(Receiver {
                            rx_id: GridSpec::rx_id(ix, iy),
                            position: g.position(ix, iy),
                            t: None,
                        });
                    }
                }
                out
            }
            ReceiverLayout::Trajectory { points } => points
                .iter()
                .map(|p| Receiver {
                    rx_id: p.rx_id.clone(),
                    position: p.position,
                    t: Some(p.t),
                })
                .collect(),
            ReceiverLayout::Explicit { receivers } => receivers.clone(),
        }
    }
}

fn check_unique<'a>(ids: impl Iterator<Item = &'a str>) -> Result<(), ValidationError> {
    let mut seen = std::collections::HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(ValidationError::DuplicateRxId(id.to_string()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(nx: usize, ny: usize, dx: f64) -> ReceiverLayout {
        ReceiverLayout::Grid(GridSpec {
            origin_x: 0.0,
            origin_y: 0.0,
            nx,
            ny,
            dx,
            dy: 2.0,
            height: 1.5,
        })
    }

    #[test]
    fn grid_validation() {
        assert!(grid(2, 2, 2.0).validate().is_ok());
        assert!(grid(0, 2, 2.0).validate().is_err());
        assert!(grid(2, 2, 0.0).validate().is_err());
    }

    #[test]
    fn grid_ids_round_trip() {
        let layout = grid(3, 2, 2.0);
        let rx = layout.receivers();
        assert_eq!(rx.len(), 6);
        assert_eq!(rx[4].rx_id, "g1_1");
        assert_eq!(rx[4].position, Vec3::new(2.0, 2.0, 1.5));
        assert_eq!(GridSpec::parse_rx_id("g12_7"), Some((12, 7)));
        assert_eq!(GridSpec::parse_rx_id("x1_2"), None);
    }

    #[test]
    fn trajectory_needs_increasing_time() {
        let ok = ReceiverLayout::trajectory_from_samples(&[
            (0.0, Vec3::default()),
            (0.1, Vec3::new(1.0, 0.0, 1.5)),
        ]);
        assert!(ok.validate().is_ok());
        let bad = ReceiverLayout::trajectory_from_samples(&[
            (0.1, Vec3::default()),
            (0.1, Vec3::new(1.0, 0.0, 1.5)),
        ]);
        assert!(bad.validate().is_err());
    }
}
