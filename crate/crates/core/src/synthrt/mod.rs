//! Deterministic image-method tracer over a ground plane and axis-aligned
//! boxes: line of sight plus specular reflections up to second order, with
//! free-space loss and a scalar loss per bounce.
//!
//! Coordinates are meters with z up and the ground at z = 0.

mod geometry;
mod scene;
mod tracer;

pub use geometry::{Aabb, Face, FaceId};
pub use scene::{
    default_materials, BoxSpec, Material, SceneSpec, TxSpec, DEFAULT_CARRIER_FREQUENCY_HZ,
    DEFAULT_POWER_FLOOR_DBM,
};
pub use tracer::{
    fspl_db, line_of_sight, sort_paths, specular_reflections, trace, TraceOutput, TracedPath, Tracer,
    SPEED_OF_LIGHT,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("scene parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown material {0:?}")]
    UnknownMaterial(String),
    #[error("invalid scene: {0}")]
    Invalid(String),
}
