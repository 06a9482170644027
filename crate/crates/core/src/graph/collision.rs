use std::collections::{BTreeSet, HashMap};

use super::viewpoints::Viewpoint;
use super::{GraphError, NodeId};
use crate::geometry::{for_each_segment_cell, Flow, Point};
use crate::gridworld::OccupancyBelief;

/// True when every supercover cell of the segment is known free.
pub fn segment_is_free(belief: &OccupancyBelief, a: Point, b: Point) -> bool {
    let mut ok = true;
    for_each_segment_cell(a, b, belief.resolution(), |(x, y)| {
        if belief.is_free_signed(x, y) {
            Flow::Continue
        } else {
            ok = false;
            Flow::Stop
        }
    });
    ok
}

/// Viewpoints joined by collision-free k-nearest-neighbour edges.
#[derive(Clone, Debug, PartialEq)]
pub struct CollisionFreeGraph {
    nodes: Vec<Viewpoint>,
    index: HashMap<NodeId, usize>,
    /// Undirected edges as `(smaller id, larger id)`, sorted.
    edges: Vec<(NodeId, NodeId)>,
    /// Neighbour indices per node, ascending by id.
    adjacency: Vec<Vec<usize>>,
    pub k: usize,
    pub node_resolution: f64,
}

impl CollisionFreeGraph {
    /// Assembles a graph from parts. Edges are normalized, deduplicated and
    /// must reference existing nodes.
    pub fn from_parts(
        mut nodes: Vec<Viewpoint>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
        k: usize,
        node_resolution: f64,
    ) -> Result<Self, GraphError> {
        nodes.sort_by_key(|n| n.id);
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id, i).is_some() {
                return Err(GraphError::DuplicateNode(n.id));
            }
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            for id in [a, b] {
                if !index.contains_key(&id) {
                    return Err(GraphError::UnknownNode(id));
                }
            }
            set.insert((a.min(b), a.max(b)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for &(a, b) in &edges {
            let (ia, ib) = (index[&a], index[&b]);
            adjacency[ia].push(ib);
            adjacency[ib].push(ia);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        Ok(Self {
            nodes,
            index,
            edges,
            adjacency,
            k,
            node_resolution,
        })
    }

    pub fn nodes(&self) -> &[Viewpoint] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn node(&self, id: NodeId) -> Option<&Viewpoint> {
        self.index_of(id).map(|i| &self.nodes[i])
    }

    pub fn node_at(&self, idx: usize) -> &Viewpoint {
        &self.nodes[idx]
    }

    /// Neighbour indices of the node at `idx`, ascending by id.
    pub fn neighbors_of_index(&self, idx: usize) -> &[usize] {
        &self.adjacency[idx]
    }

    pub fn neighbors(&self, id: NodeId) -> Vec<NodeId> {
        self.index_of(id)
            .map(|i| {
                self.adjacency[i]
                    .iter()
                    .map(|&j| self.nodes[j].id)
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.index_of(id)
            .map(|i| self.adjacency[i].len())
            .unwrap_or(0)
    }

    /// Overwrites node utilities from a lookup.
    pub fn set_utilities(&mut self, mut utility: impl FnMut(NodeId) -> u32) {
        for n in &mut self.nodes {
            n.utility = utility(n.id);
        }
    }

    /// Node closest to `p`, ties to the smaller id.
    pub fn nearest_node(&self, p: Point) -> Option<&Viewpoint> {
        self.nodes.iter().min_by(|a, b| {
            a.position
                .distance_sq(&p)
                .total_cmp(&b.position.distance_sq(&p))
                .then(a.id.cmp(&b.id))
        })
    }
}

/// k-NN candidate edges (symmetrized), kept when their segment crosses only
/// known-free cells.
pub fn build_graph(
    viewpoints: &[Viewpoint],
    k: usize,
    belief: &OccupancyBelief,
    node_resolution: f64,
) -> Result<CollisionFreeGraph, GraphError> {
    if k == 0 {
        return Err(GraphError::InvalidK);
    }
    let mut nodes = viewpoints.to_vec();
    nodes.sort_by_key(|n| n.id);
    let n = nodes.len();
    let mut candidates: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    let mut scratch: Vec<(f64, NodeId, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        scratch.clear();
        let pi = nodes[i].position;
        for (j, other) in nodes.iter().enumerate() {
            if j != i {
                scratch.push((pi.distance_sq(&other.position), other.id, j));
            }
        }
        let take = k.min(scratch.len());
        if take == 0 {
            continue;
        }
        let cmp = |a: &(f64, NodeId, usize), b: &(f64, NodeId, usize)| {
            a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
        };
        if take < scratch.len() {
            scratch.select_nth_unstable_by(take - 1, cmp);
        }
        for &(_, _, j) in &scratch[..take] {
            let (a, b) = (nodes[i].id, nodes[j].id);
            candidates.insert((a.min(b), a.max(b)));
        }
    }
    let pos: HashMap<NodeId, Point> = nodes.iter().map(|v| (v.id, v.position)).collect();
    let edges: Vec<_> = candidates
        .into_iter()
        .filter(|(a, b)| segment_is_free(belief, pos[a], pos[b]))
        .collect();
    CollisionFreeGraph::from_parts(nodes, edges, k, node_resolution)
}
