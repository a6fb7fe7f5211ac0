//! Identify and localize known rigid objects on a table top by rendering
//! hypothesized scenes and searching for the assignment of object poses that
//! best explains an observed depth point cloud.
//!
//! The pipeline is:
//!
//! 1. [`render`] turns posed meshes into depth images and point clouds;
//! 2. [`cost`] counts points left unexplained between observed and rendered
//!    clouds, and splits that count into per-object edge costs;
//! 3. [`msgt`] generates monotone successors (objects added so they never
//!    occlude what is already rendered), refining each with [`align`];
//! 4. [`search`] runs a bounded-suboptimal multi-heuristic best-first search
//!    over that tree;
//! 5. [`harness`] synthesizes scenes, removes the table plane, evaluates
//!    predictions and runs end-to-end experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod align;
pub mod cost;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod io;
pub mod msgt;
pub mod render;
pub mod search;

pub use error::{Error, Result};
pub use geometry::{
    CameraModel, Frame, Point3, PointCloud, RigidPose2D, SpatialIndex, TriMesh, VolumeApprox,
};
pub use msgt::{GridSpec, ObjectModel, ObjectPoseHypothesis, SceneState, SceneTask};
pub use render::DepthImage;
pub use search::{Heuristic, SearchConfig, SearchResult};
