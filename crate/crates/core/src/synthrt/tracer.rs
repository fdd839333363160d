use indexmap::IndexMap;
use rayon::prelude::*;

use crate::ingest::{Dataset, DatasetMetadata};
use crate::model::{PathSet, PathTuple, ReceiverLayout, Vec3};

use super::geometry::{Aabb, Face, FaceId};
use super::{SceneError, SceneSpec};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Free-space path loss `20 log10(4π d f / c)` in dB.
pub fn fspl_db(length_m: f64, f_hz: f64) -> Result<f64, SceneError> {
    if !(length_m > 0.0) {
        return Err(SceneError::Invalid(format!("path length must be positive, got {length_m}")));
    }
    if !(f_hz > 0.0) {
        return Err(SceneError::Invalid(format!("frequency must be positive, got {f_hz}")));
    }
    Ok(20.0 * (4.0 * std::f64::consts::PI * length_m * f_hz / SPEED_OF_LIGHT).log10())
}

/// A traced path with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct TracedPath {
    pub tuple: PathTuple,
    /// Reflecting faces in bounce order; empty for line of sight.
    pub interactions: Vec<FaceId>,
    pub length_m: f64,
}

/// Scene prepared for tracing: reflecting faces and occluders.
#[derive(Debug, Clone)]
pub struct Tracer<'a> {
    scene: &'a SceneSpec,
    faces: Vec<Face>,
    boxes: Vec<Aabb>,
}

impl<'a> Tracer<'a> {
    pub fn new(scene: &'a SceneSpec) -> Result<Self, SceneError> {
        scene.validate()?;
        let loss = |name: &str| {
            scene
                .material_loss(name)
                .ok_or_else(|| SceneError::UnknownMaterial(name.to_string()))
        };
        let mut faces = vec![Face::ground(loss(&scene.ground)?)];
        let mut boxes = Vec::with_capacity(scene.boxes.len());
        for (i, b) in scene.boxes.iter().enumerate() {
            let aabb = b.aabb();
            faces.extend(Face::box_faces(i, &aabb, loss(&b.material)?));
            boxes.push(aabb);
        }
        Ok(Self { scene, faces, boxes })
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// True when `p` cannot host a receiver: inside a box or below ground.
    pub fn is_blocked_position(&self, p: Vec3) -> bool {
        p.z < 0.0 || self.boxes.iter().any(|b| b.contains(p))
    }

    fn segment_clear(&self, a: Vec3, b: Vec3) -> bool {
        if a.z < 0.0 || b.z < 0.0 {
            return false;
        }
        !self.boxes.iter().any(|bx| bx.blocks_segment(a, b))
    }

    /// Builds the path through `points` (tx, bounce points..., rx).
    fn make_path(&self, points: &[Vec3], faces: &[&Face]) -> Option<TracedPath> {
        let length: f64 = points.windows(2).map(|w| w[0].distance(w[1])).sum();
        if !(length > 0.0) {
            return None;
        }
        let loss: f64 = faces.iter().map(|f| f.loss_db).sum();
        let fspl = fspl_db(length, self.scene.carrier_frequency_hz).ok()?;
        let power_dbm = self.scene.tx.power_dbm - fspl - loss;
        if power_dbm < self.scene.power_floor_dbm {
            return None;
        }
        let n = points.len();
        let dod = (points[1] - points[0]).az_el_deg();
        let doa = (points[n - 2] - points[n - 1]).az_el_deg();
        Some(TracedPath {
            tuple: PathTuple::new(power_dbm, length / SPEED_OF_LIGHT, dod, doa),
            interactions: faces.iter().map(|f| f.id).collect(),
            length_m: length,
        })
    }

    pub fn line_of_sight(&self, tx: Vec3, rx: Vec3) -> Option<TracedPath> {
        if tx == rx || !self.segment_clear(tx, rx) {
            return None;
        }
        self.make_path(&[tx, rx], &[])
    }

    /// Image-method solve for one ordered face sequence.
    fn reflect_sequence(&self, tx: Vec3, rx: Vec3, seq: &[&Face]) -> Option<TracedPath> {
        let k = seq.len();
        // images[j] is tx mirrored across seq[0..j]
        let mut images = Vec::with_capacity(k + 1);
        images.push(tx);
        for f in seq {
            images.push(f.mirror(*images.last().unwrap()));
        }
        // walk back from rx, placing each bounce point
        let mut points = vec![Vec3::default(); k + 2];
        points[0] = tx;
        points[k + 1] = rx;
        let mut target = rx;
        for j in (0..k).rev() {
            let f = seq[j];
            if !(f.signed_distance(target) > 0.0) {
                return None;
            }
            let p = f.plane_crossing(images[j + 1], target)?;
            if !f.contains_in_plane(p) {
                return None;
            }
            points[j + 1] = p;
            target = p;
        }
        // the incoming side of every bounce must face the reflector too
        for j in 0..k {
            if !(seq[j].signed_distance(points[j]) > 0.0) {
                return None;
            }
        }
        if !points.windows(2).all(|w| self.segment_clear(w[0], w[1])) {
            return None;
        }
        self.make_path(&points, seq)
    }

    /// All specular paths with 1..=order bounces, in enumeration order.
    pub fn specular_reflections(&self, tx: Vec3, rx: Vec3, order: u8) -> Vec<TracedPath> {
        let mut out = Vec::new();
        if order >= 1 {
            for f in &self.faces {
                out.extend(self.reflect_sequence(tx, rx, &[f]));
            }
        }
        if order >= 2 {
            for (i, f1) in self.faces.iter().enumerate() {
                if !(f1.signed_distance(tx) > 0.0) {
                    continue;
                }
                for (j, f2) in self.faces.iter().enumerate() {
                    if i != j {
                        out.extend(self.reflect_sequence(tx, rx, &[f1, f2]));
                    }
                }
            }
        }
        out
    }

    /// LOS (if enabled) plus reflections up to the scene's maximum order,
    /// sorted by descending power. `None` when the receiver position is
    /// blocked.
    pub fn trace_receiver(&self, tx: Vec3, rx: Vec3) -> Option<Vec<TracedPath>> {
        if self.is_blocked_position(rx) {
            return None;
        }
        let mut paths = Vec::new();
        if self.scene.los_enabled {
            paths.extend(self.line_of_sight(tx, rx));
        }
        paths.extend(self.specular_reflections(tx, rx, self.scene.max_reflection_order));
        sort_paths(&mut paths);
        Some(paths)
    }
}

/// Descending power, then face sequence.
pub fn sort_paths(paths: &mut [TracedPath]) {
    paths.sort_by(|a, b| {
        b.tuple
            .power_dbm
            .total_cmp(&a.tuple.power_dbm)
            .then_with(|| a.interactions.cmp(&b.interactions))
    });
}

pub fn line_of_sight(scene: &SceneSpec, tx: Vec3, rx: Vec3) -> Result<Option<TracedPath>, SceneError> {
    Ok(Tracer::new(scene)?.line_of_sight(tx, rx))
}

pub fn specular_reflections(
    scene: &SceneSpec,
    tx: Vec3,
    rx: Vec3,
    order: u8,
) -> Result<Vec<TracedPath>, SceneError> {
    if !(1..=2).contains(&order) {
        return Err(SceneError::Invalid(format!("reflection order {order} not in 1..=2")));
    }
    Ok(Tracer::new(scene)?.specular_reflections(tx, rx, order))
}

/// Traced dataset plus per-receiver provenance.
#[derive(Debug, Clone)]
pub struct TraceOutput {
    pub dataset: Dataset,
    /// Traced paths per receiver, in the same order as the dataset's path
    /// sets. Blocked receivers map to an empty list.
    pub provenance: IndexMap<String, Vec<TracedPath>>,
}

/// Traces every receiver of `layout` from the scene's transmitter.
pub fn trace(scene: &SceneSpec, layout: &ReceiverLayout, label: &str) -> Result<TraceOutput, SceneError> {
    layout.validate().map_err(|e| SceneError::Invalid(e.to_string()))?;
    let tracer = Tracer::new(scene)?;
    let tx = scene.tx.position;
    let receivers = layout.receivers();
    let traced: Vec<Option<Vec<TracedPath>>> = receivers
        .par_iter()
        .map(|r| tracer.trace_receiver(tx, r.position))
        .collect();

    let mut metadata = DatasetMetadata {
        label: label.to_string(),
        frequency_hz: Some(scene.carrier_frequency_hz),
        tx_position: Some(tx),
        layout: Some(layout.clone()),
        ..Default::default()
    };
    let mut provenance = IndexMap::with_capacity(receivers.len());
    let mut entries = Vec::with_capacity(receivers.len());
    for (r, paths) in receivers.into_iter().zip(traced) {
        let paths = match paths {
            Some(p) => p,
            None => {
                metadata.flagged_receivers.push(r.rx_id.clone());
                Vec::new()
            }
        };
        let set = PathSet::new(r.rx_id.clone(), paths.iter().map(|p| p.tuple).collect());
        entries.push((r, set));
        provenance.insert(entries.last().unwrap().0.rx_id.clone(), paths);
    }
    let mut dataset = Dataset::new(metadata);
    for (r, set) in entries {
        dataset
            .insert(r.rx_id, r.position, r.t, set)
            .map_err(|e| SceneError::Invalid(e.to_string()))?;
    }
    Ok(TraceOutput { dataset, provenance })
}
