//! Viewpoint sampling, the collision-free graph, utility, and the local window.

mod collision;
pub mod dump;
mod local;
mod paths;
mod utility;
mod viewpoints;

use thiserror::Error;

pub use collision::{build_graph, segment_is_free, CollisionFreeGraph};
pub use local::{extract_local, LocalGraph};
pub use paths::ShortestPaths;
pub use utility::{compute_utility, nearest_visible_frontier, UtilityCache};
pub use viewpoints::{sample_viewpoints, Lattice, Viewpoint};

/// Stable viewpoint identifier (lattice-cell index).
pub type NodeId = u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("node resolution {node} must be at least the map resolution {map}")]
    InvalidResolution { node: f64, map: f64 },
    #[error("k must be at least 1")]
    InvalidK,
    #[error("window {size} must exceed twice the node resolution {node_resolution}")]
    WindowTooSmall { size: f64, node_resolution: f64 },
    #[error("no graph node inside the local window around the robot")]
    EmptyWindow,
    #[error("duplicate node {0}")]
    DuplicateNode(NodeId),
    #[error("edge references unknown node {0}")]
    UnknownNode(NodeId),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("parse error: {0}")]
    Parse(String),
}
