use super::collision::CollisionFreeGraph;
use super::viewpoints::Viewpoint;
use super::{GraphError, NodeId};
use crate::geometry::Point;

/// Subgraph inside a `size x size` square window centered on the robot.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalGraph {
    pub center: Point,
    pub size: f64,
    /// Nodes sorted by id.
    pub nodes: Vec<Viewpoint>,
    /// Edges `(smaller id, larger id)`, sorted.
    pub edges: Vec<(NodeId, NodeId)>,
}

impl LocalGraph {
    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.binary_search_by_key(&id, |n| n.id).is_ok()
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.nodes.binary_search_by_key(&id, |n| n.id).ok()
    }
}

fn in_window(center: Point, half: f64, p: Point) -> bool {
    (p.x - center.x).abs() <= half && (p.y - center.y).abs() <= half
}

/// Induced subgraph of the nodes inside the closed square window.
pub fn extract_local(
    graph: &CollisionFreeGraph,
    robot: Point,
    size: f64,
) -> Result<LocalGraph, GraphError> {
    if !(size > 2.0 * graph.node_resolution) {
        return Err(GraphError::WindowTooSmall {
            size,
            node_resolution: graph.node_resolution,
        });
    }
    let half = size / 2.0;
    let nodes: Vec<Viewpoint> = graph
        .nodes()
        .iter()
        .filter(|n| in_window(robot, half, n.position))
        .copied()
        .collect();
    let nearest = graph.nearest_node(robot).ok_or(GraphError::EmptyWindow)?;
    if nodes.binary_search_by_key(&nearest.id, |n| n.id).is_err() {
        return Err(GraphError::EmptyWindow);
    }
    let edges = graph
        .edges()
        .iter()
        .filter(|(a, b)| {
            nodes.binary_search_by_key(a, |n| n.id).is_ok()
                && nodes.binary_search_by_key(b, |n| n.id).is_ok()
        })
        .copied()
        .collect();
    Ok(LocalGraph {
        center: robot,
        size,
        nodes,
        edges,
    })
}
