use serde::{Deserialize, Serialize};
use std::fmt;

use crate::model::Vec3;

/// Segment parameters closer than this to an endpoint are not tested for
/// occlusion, so paths may start and end on box surfaces.
const SEGMENT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    /// Closed containment.
    pub fn contains(&self, p: Vec3) -> bool {
        (0..3).all(|a| p.get(a) >= self.min.get(a) && p.get(a) <= self.max.get(a))
    }

    /// True when the segment a→b runs through the open interior of the box
    /// over a parameter interval of positive length.
    pub fn blocks_segment(&self, a: Vec3, b: Vec3) -> bool {
        let d = b - a;
        let mut t_enter = SEGMENT_EPS;
        let mut t_exit = 1.0 - SEGMENT_EPS;
        for axis in 0..3 {
            let (o, dir) = (a.get(axis), d.get(axis));
            let (lo, hi) = (self.min.get(axis), self.max.get(axis));
            if dir == 0.0 {
                if o <= lo || o >= hi {
                    return false;
                }
                continue;
            }
            let (mut t0, mut t1) = ((lo - o) / dir, (hi - o) / dir);
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            t_enter = t_enter.max(t0);
            t_exit = t_exit.min(t1);
            if t_enter >= t_exit {
                return false;
            }
        }
        true
    }
}

/// Identifies a reflecting surface: the ground plane or one side of a box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FaceId {
    Ground,
    Box {
        index: usize,
        axis: u8,
        positive: bool,
    },
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaceId::Ground => f.write_str("ground"),
            FaceId::Box {
                index,
                axis,
                positive,
            } => {
                let sign = if *positive { '+' } else { '-' };
                let name = ['x', 'y', 'z'][*axis as usize];
                write!(f, "box{index}:{sign}{name}")
            }
        }
    }
}

/// Planar axis-aligned reflector. `bounds` limits the face in the two other
/// axes; `None` means unbounded (the ground).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Face {
    pub id: FaceId,
    pub axis: usize,
    pub offset: f64,
    /// +1 when the outward normal points along +axis, -1 otherwise.
    pub normal_sign: f64,
    pub bounds: Option<[(f64, f64); 2]>,
    pub loss_db: f64,
}

impl Face {
    pub fn ground(loss_db: f64) -> Self {
        Face {
            id: FaceId::Ground,
            axis: 2,
            offset: 0.0,
            normal_sign: 1.0,
            bounds: None,
            loss_db,
        }
    }

    pub fn box_faces(index: usize, b: &Aabb, loss_db: f64) -> [Face; 6] {
        std::array::from_fn(|k| {
            let axis = k / 2;
            let positive = k % 2 == 1;
            let (u, v) = Self::other_axes(axis);
            Face {
                id: FaceId::Box {
                    index,
                    axis: axis as u8,
                    positive,
                },
                axis,
                offset: if positive { b.max.get(axis) } else { b.min.get(axis) },
                normal_sign: if positive { 1.0 } else { -1.0 },
                bounds: Some([(b.min.get(u), b.max.get(u)), (b.min.get(v), b.max.get(v))]),
                loss_db,
            }
        })
    }

    pub fn other_axes(axis: usize) -> (usize, usize) {
        match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        }
    }

    /// Signed distance along the outward normal.
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        self.normal_sign * (p.get(self.axis) - self.offset)
    }

    pub fn mirror(&self, p: Vec3) -> Vec3 {
        p.with(self.axis, 2.0 * self.offset - p.get(self.axis))
    }

    /// Closed test of the in-plane coordinates against the face rectangle.
    pub fn contains_in_plane(&self, p: Vec3) -> bool {
        match self.bounds {
            None => true,
            Some([(u0, u1), (v0, v1)]) => {
                let (u, v) = Self::other_axes(self.axis);
                let (pu, pv) = (p.get(u), p.get(v));
                pu >= u0 && pu <= u1 && pv >= v0 && pv <= v1
            }
        }
    }

    /// Point where the segment a→b crosses the face plane, if it crosses it
    /// strictly between the endpoints.
    pub fn plane_crossing(&self, a: Vec3, b: Vec3) -> Option<Vec3> {
        let (pa, pb) = (a.get(self.axis), b.get(self.axis));
        let denom = pb - pa;
        if denom == 0.0 {
            return None;
        }
        let t = (self.offset - pa) / denom;
        if !(t > 0.0 && t < 1.0) {
            return None;
        }
        Some((a + (b - a) * t).with(self.axis, self.offset))
    }
}
