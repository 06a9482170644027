//! Community detection, per-community modularity, top-k pruning and the
//! global belief graph.

mod global;
mod louvain;
mod modularity;
mod prune;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{CollisionFreeGraph, NodeId};

pub use global::{build_global_graph, GlobalBeliefGraph, GlobalEdge, GlobalNode};
pub use louvain::detect_communities;
pub use modularity::{community_modularity, community_scores, modularity, CommunityScore};
pub use prune::{aggregate_utilities, prune_topk, rank_order, select_top_k};

pub type CommunityId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CommunityError {
    #[error("modularity is undefined on a graph without edges")]
    UndefinedModularity,
    #[error("unknown community {0}")]
    UnknownCommunity(CommunityId),
    #[error("partition labels {assigned} nodes but the graph has {nodes}")]
    PartitionMismatch { nodes: usize, assigned: usize },
    #[error("partition community ids must be dense from 0")]
    SparsePartition,
    #[error("k_top must be at least 1")]
    InvalidTopK,
    #[error("no community retained")]
    NothingRetained,
    #[error("edge ({0}, {1}) is invalid")]
    InvalidEdge(usize, usize),
}

/// Unweighted, undirected simple graph on node indices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Topology {
    /// Edges are normalized to `(min, max)` and deduplicated.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, CommunityError> {
        let mut list: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(CommunityError::InvalidEdge(a, b));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        list.dedup();
        Ok(Self { n, edges: list })
    }

    /// Indices follow the graph's id-sorted node order.
    pub fn from_graph(graph: &CollisionFreeGraph) -> Self {
        let edges = graph
            .edges()
            .iter()
            .map(|(a, b)| (graph.index_of(*a).unwrap(), graph.index_of(*b).unwrap()))
            .collect();
        Self {
            n: graph.len(),
            edges,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, i: usize) -> usize {
        self.edges
            .iter()
            .filter(|(a, b)| *a == i || *b == i)
            .count()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }
}

/// Total assignment of node indices to dense community ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    assignment: Vec<CommunityId>,
    count: usize,
}

impl Partition {
    pub fn new(assignment: Vec<CommunityId>) -> Result<Self, CommunityError> {
        let count = assignment.iter().max().map(|m| m + 1).unwrap_or(0);
        let mut seen = vec![false; count];
        for &c in &assignment {
            seen[c] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(CommunityError::SparsePartition);
        }
        Ok(Self { assignment, count })
    }

    /// Everything in community 0.
    pub fn single(n: usize) -> Self {
        Self {
            assignment: vec![0; n],
            count: usize::from(n > 0),
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            assignment: (0..n).collect(),
            count: n,
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn community_of(&self, node: usize) -> CommunityId {
        self.assignment[node]
    }

    pub fn community_count(&self) -> usize {
        self.count
    }

    pub fn assignment(&self) -> &[CommunityId] {
        &self.assignment
    }

    pub fn members(&self, community: CommunityId) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == community)
            .collect()
    }

    /// Community of viewpoint `id` in `graph`.
    pub fn community_of_id(&self, graph: &CollisionFreeGraph, id: NodeId) -> Option<CommunityId> {
        graph.index_of(id).map(|i| self.assignment[i])
    }
}

/// Per-community debug lines: `community <id> <sigma_in> <sigma_tot> <q> <members> <retained>`.
pub fn community_dump(
    scores: &[CommunityScore],
    partition: &Partition,
    retained: &[CommunityId],
) -> String {
    let mut sizes = vec![0usize; partition.community_count()];
    for &c in partition.assignment() {
        sizes[c] += 1;
    }
    let mut out = String::new();
    for s in scores {
        let _ = writeln!(
            out,
            "community {} {} {} {} {} {}",
            s.community,
            s.sigma_in,
            s.sigma_tot,
            s.q,
            sizes.get(s.community).copied().unwrap_or(0),
            u8::from(retained.contains(&s.community))
        );
    }
    out
}
