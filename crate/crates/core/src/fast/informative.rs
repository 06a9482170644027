use serde::{Deserialize, Serialize};

use super::FastError;
use crate::geometry::Point;
use crate::graph::{LocalGraph, NodeId};

/// Global guidance as seen by the local policy.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GuidanceContext {
    /// Positions along the current global path; empty without guidance.
    pub global_path: Vec<Point>,
    /// First global path point not yet reached.
    pub next_waypoint: Option<Point>,
    /// Recently executed poses.
    pub trail: Vec<Point>,
    pub node_resolution: f64,
}

/// Local graph with per-node features `(x, y, u, g)`.
///
/// Positions are robot-centric and divided by the window half-width.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InformativeGraph {
    pub ids: Vec<NodeId>,
    pub positions: Vec<Point>,
    pub features: Vec<[f64; 4]>,
    /// Node lies on the executed trail.
    pub visited: Vec<bool>,
    /// Index pairs into `ids`.
    pub edges: Vec<(usize, usize)>,
    pub current: usize,
}

impl InformativeGraph {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Neighbors of the current node, by ascending id.
    pub fn current_neighbors(&self) -> Vec<usize> {
        let c = self.current;
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == c {
                    Some(b)
                } else if b == c {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_by_key(|&i| self.ids[i]);
        out.dedup();
        out
    }

    pub fn guidepost(&self, i: usize) -> bool {
        self.features[i][3] == 1.0
    }
}

/// Assembles features for the local graph around `robot`. `utility_scale` is
/// the running maximum utility (values below 1 are treated as 1).
pub fn build_informative_graph(
    local: &LocalGraph,
    robot: Point,
    guidance: &GuidanceContext,
    utility_scale: f64,
) -> Result<InformativeGraph, FastError> {
    if local.nodes.is_empty() {
        return Err(FastError::EmptyGraph);
    }
    let half = local.size / 2.0;
    let scale = utility_scale.max(1.0);
    let tol = guidance.node_resolution / 2.0;
    let near = |p: &Point, set: &[Point]| set.iter().any(|q| p.distance(q) < tol);

    let current = (0..local.nodes.len())
        .min_by(|&a, &b| {
            let (va, vb) = (&local.nodes[a], &local.nodes[b]);
            va.position
                .distance_sq(&robot)
                .total_cmp(&vb.position.distance_sq(&robot))
                .then(va.id.cmp(&vb.id))
        })
        .unwrap();
    let features = local
        .nodes
        .iter()
        .map(|v| {
            [
                (v.position.x - robot.x) / half,
                (v.position.y - robot.y) / half,
                v.utility as f64 / scale,
                if near(&v.position, &guidance.global_path) {
                    1.0
                } else {
                    0.0
                },
            ]
        })
        .collect();
    let edges = local
        .edges
        .iter()
        .map(|(a, b)| (local.index_of(*a).unwrap(), local.index_of(*b).unwrap()))
        .collect();
    Ok(InformativeGraph {
        ids: local.nodes.iter().map(|v| v.id).collect(),
        positions: local.nodes.iter().map(|v| v.position).collect(),
        visited: local
            .nodes
            .iter()
            .map(|v| near(&v.position, &guidance.trail))
            .collect(),
        features,
        edges,
        current,
    })
}
