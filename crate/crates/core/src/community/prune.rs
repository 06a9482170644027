use std::cmp::Ordering;
use std::collections::BTreeSet;

use super::modularity::{community_scores, CommunityScore};
use super::{CommunityError, CommunityId, Partition, Topology};
use crate::graph::{CollisionFreeGraph, NodeId};

/// Ranking order: higher `Q(c)`, then higher aggregate utility, then smaller id.
pub fn rank_order(a: &(CommunityScore, u64), b: &(CommunityScore, u64)) -> Ordering {
    b.0.q
        .total_cmp(&a.0.q)
        .then(b.1.cmp(&a.1))
        .then(a.0.community.cmp(&b.0.community))
}

/// Keeps the `k_top` best-ranked communities plus every protected one.
/// Returns retained ids in ascending order.
pub fn select_top_k(
    scored: &[(CommunityScore, u64)],
    k_top: usize,
    protected: &BTreeSet<CommunityId>,
) -> Result<Vec<CommunityId>, CommunityError> {
    if k_top == 0 {
        return Err(CommunityError::InvalidTopK);
    }
    let mut ranked = scored.to_vec();
    ranked.sort_by(rank_order);
    let mut keep: BTreeSet<CommunityId> = ranked
        .iter()
        .take(k_top)
        .map(|(s, _)| s.community)
        .collect();
    keep.extend(protected.iter().copied());
    Ok(keep.into_iter().collect())
}

/// Sum of member utilities per community.
pub fn aggregate_utilities(graph: &CollisionFreeGraph, partition: &Partition) -> Vec<u64> {
    let mut out = vec![0u64; partition.community_count()];
    for (i, node) in graph.nodes().iter().enumerate() {
        out[partition.community_of(i)] += node.utility as u64;
    }
    out
}

/// Top-k pruning by per-community modularity.
///
/// Communities holding any node in `robot_nodes` or any node with positive
/// utility are always retained, so pruning never removes the plan's source
/// or its targets.
pub fn prune_topk(
    graph: &CollisionFreeGraph,
    partition: &Partition,
    k_top: usize,
    robot_nodes: &[NodeId],
) -> Result<Vec<CommunityId>, CommunityError> {
    let topology = Topology::from_graph(graph);
    let utilities = aggregate_utilities(graph, partition);
    let scores: Vec<CommunityScore> = if topology.edge_count() == 0 {
        // Modularity is undefined; rank on utility alone.
        (0..partition.community_count())
            .map(|c| CommunityScore {
                community: c,
                sigma_in: 0,
                sigma_tot: 0,
                q: 0.0,
            })
            .collect()
    } else {
        community_scores(&topology, partition)?
    };
    let mut protected = BTreeSet::new();
    for (i, node) in graph.nodes().iter().enumerate() {
        if node.utility > 0 || robot_nodes.contains(&node.id) {
            protected.insert(partition.community_of(i));
        }
    }
    let scored: Vec<(CommunityScore, u64)> = scores.into_iter().zip(utilities).collect();
    select_top_k(&scored, k_top, &protected)
}
