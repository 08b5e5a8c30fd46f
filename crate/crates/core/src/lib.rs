//! Lennard-Jones layers (LJL) for distribution normalization of 2D and 3D
//! point clouds.
//!
//! Each LJL step pairs every point with its nearest neighbor and pushes the
//! pair toward the Lennard-Jones equilibrium distance with a tanh-bounded,
//! velocity-free Störmer–Verlet move. Repeating it with a decaying step size
//! turns white noise into blue noise, spreads points evenly over meshes, and
//! can be interleaved with any iterative point-cloud refiner.

pub mod analysis;
pub mod cli;
mod cloud;
mod error;
pub mod format;
pub mod geometry;
pub mod lj;
pub mod neighbors;
pub mod pipelines;

pub use cloud::{PointCloud, Vec3};
pub use error::{LjlError, Result};
pub use lj::{
    clamp_distance, equilibrium_factor, lj_force, lj_potential, ljl_step, LjParams, PairAssignment, Schedule,
    ScheduleKind,
};
pub use neighbors::{nearest_normal_filtered, Metric, SpatialIndex};
