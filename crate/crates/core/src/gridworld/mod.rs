//! Ground-truth environments, sensing, belief and the exploration objective.

mod belief;
mod frontier;
mod generate;
pub mod io;
mod map;
mod metrics;
mod sensing;

use thiserror::Error;

use crate::geometry::Point;

pub use belief::{BeliefCell, OccupancyBelief};
pub use frontier::{detect_frontiers, is_frontier, FrontierSet};
pub use generate::{generate_map, MIN_MAP_SIDE, STRUCTURE_UNIT};
pub use map::{GroundTruthMap, MapHeader, MapKind, Occupancy};
pub use metrics::{
    completion, is_complete, path_length, reachable_coverage, Completion, CoverageTracker,
};
pub use sensing::{scan_footprint, sense_and_update, RangeSensor, ScanReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("map generation failed: {0}")]
    Generation(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("pose ({}, {}) is outside the map", .0.x, .0.y)]
    PoseOutOfBounds(Point),
    #[error("pose ({}, {}) is inside an obstacle", .0.x, .0.y)]
    PoseInObstacle(Point),
    #[error("invalid sensor: {0}")]
    InvalidSensor(String),
    #[error("parse error: {0}")]
    Parse(String),
}
