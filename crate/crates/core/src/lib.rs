//! Compare two ray-tracing channel simulations path-by-path.
//!
//! Each receiver's propagation paths form a point cloud of
//! (power, delay, departure direction, arrival direction) tuples. Two such
//! clouds are compared with symmetrized Hausdorff (HRT) and Chamfer (CRT)
//! distances built on a composite per-path distance, and the results are
//! aggregated over receiver grids and trajectories. A small image-method
//! tracer produces synthetic scenario pairs.

pub mod analysis;
pub mod cli;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod plot;
pub mod synthrt;
