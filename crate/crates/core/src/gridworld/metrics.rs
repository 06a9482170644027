use serde::{Deserialize, Serialize};

use super::belief::{BeliefCell, OccupancyBelief};
use super::frontier::detect_frontiers;
use super::map::GroundTruthMap;
use crate::geometry::Point;

/// Total Euclidean length of a polyline; zero for a single pose.
pub fn path_length(trajectory: &[Point]) -> f64 {
    trajectory.windows(2).map(|w| w[0].distance(&w[1])).sum()
}

/// Both completion readings of a belief.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Completion {
    /// No free cell borders unknown space. Usable without ground truth.
    pub frontier_empty: bool,
    /// Every free cell reachable from the start is known. Needs ground truth.
    pub reachable_covered: bool,
}

impl Completion {
    pub fn is_complete(&self) -> bool {
        self.frontier_empty && self.reachable_covered
    }
}

pub fn completion(belief: &OccupancyBelief, truth: &GroundTruthMap) -> Completion {
    Completion {
        frontier_empty: detect_frontiers(belief).is_empty(),
        reachable_covered: reachable_coverage(belief, truth) >= 1.0,
    }
}

pub fn is_complete(belief: &OccupancyBelief, truth: &GroundTruthMap) -> bool {
    completion(belief, truth).is_complete()
}

/// Fraction of reachable free cells that the belief labels.
pub fn reachable_coverage(belief: &OccupancyBelief, truth: &GroundTruthMap) -> f64 {
    let reachable = truth.reachable_free();
    let total = reachable.iter().filter(|r| **r).count();
    if total == 0 {
        return 1.0;
    }
    let known = reachable
        .iter()
        .zip(belief.cells())
        .filter(|(r, b)| **r && **b != BeliefCell::Unknown)
        .count();
    known as f64 / total as f64
}

/// Reachable-coverage counter with the flood fill done once per map.
#[derive(Clone, Debug)]
pub struct CoverageTracker {
    reachable: Vec<bool>,
    total: usize,
}

impl CoverageTracker {
    pub fn new(truth: &GroundTruthMap) -> Self {
        let reachable = truth.reachable_free();
        let total = reachable.iter().filter(|r| **r).count();
        Self { reachable, total }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn known(&self, belief: &OccupancyBelief) -> usize {
        self.reachable
            .iter()
            .zip(belief.cells())
            .filter(|(r, b)| **r && **b != BeliefCell::Unknown)
            .count()
    }

    pub fn fraction(&self, belief: &OccupancyBelief) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.known(belief) as f64 / self.total as f64
        }
    }
}
