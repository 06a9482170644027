use std::collections::{BTreeMap, BinaryHeap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{CommunityError, CommunityId, Partition};
use crate::geometry::Point;
use crate::graph::{CollisionFreeGraph, NodeId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalNode {
    pub community: CommunityId,
    /// Mean member position.
    pub centroid: Point,
    /// Sum of member utilities.
    pub utility: u64,
    /// Member nearest the centroid.
    pub representative: NodeId,
    /// Member viewpoint ids, ascending.
    pub members: Vec<NodeId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalEdge {
    pub a: CommunityId,
    pub b: CommunityId,
    /// Length of the shortest underlying inter-community edge.
    pub weight: f64,
}

/// Community-level abstraction of the collision-free graph.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GlobalBeliefGraph {
    /// Sorted by community id.
    pub nodes: Vec<GlobalNode>,
    /// `a < b`, sorted.
    pub edges: Vec<GlobalEdge>,
}

impl GlobalBeliefGraph {
    pub fn node(&self, community: CommunityId) -> Option<&GlobalNode> {
        self.nodes
            .binary_search_by_key(&community, |n| n.community)
            .ok()
            .map(|i| &self.nodes[i])
    }

    /// Community containing viewpoint `id`, if retained.
    pub fn community_of_member(&self, id: NodeId) -> Option<CommunityId> {
        self.nodes
            .iter()
            .find(|n| n.members.binary_search(&id).is_ok())
            .map(|n| n.community)
    }

    pub fn are_adjacent(&self, a: CommunityId, b: CommunityId) -> bool {
        let key = (a.min(b), a.max(b));
        self.edges.iter().any(|e| (e.a, e.b) == key)
    }

    pub fn neighbors(&self, c: CommunityId) -> Vec<(CommunityId, f64)> {
        let mut out: Vec<_> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.a == c {
                    Some((e.b, e.weight))
                } else if e.b == c {
                    Some((e.a, e.weight))
                } else {
                    None
                }
            })
            .collect();
        out.sort_by_key(|(n, _)| *n);
        out
    }

    /// Minimum-weight community sequence from `from` to `to`, inclusive.
    pub fn shortest_path(&self, from: CommunityId, to: CommunityId) -> Option<Vec<CommunityId>> {
        #[derive(PartialEq)]
        struct E(f64, CommunityId);
        impl Eq for E {}
        impl Ord for E {
            fn cmp(&self, o: &Self) -> std::cmp::Ordering {
                o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
            }
        }
        impl PartialOrd for E {
            fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(o))
            }
        }
        self.node(from)?;
        self.node(to)?;
        let mut dist: BTreeMap<CommunityId, f64> = BTreeMap::from([(from, 0.0)]);
        let mut prev: BTreeMap<CommunityId, CommunityId> = BTreeMap::new();
        let mut heap = BinaryHeap::from([E(0.0, from)]);
        while let Some(E(d, c)) = heap.pop() {
            if d > dist[&c] {
                continue;
            }
            if c == to {
                break;
            }
            for (n, w) in self.neighbors(c) {
                let nd = d + w;
                if dist.get(&n).is_none_or(|&old| nd < old) {
                    dist.insert(n, nd);
                    prev.insert(n, c);
                    heap.push(E(nd, n));
                }
            }
        }
        if !dist.contains_key(&to) {
            return None;
        }
        let mut path = vec![to];
        let mut cur = to;
        while let Some(&p) = prev.get(&cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }

    /// Text form used in external reasoner requests.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            let _ = writeln!(
                out,
                "global_node {} {} {} {} {} {}",
                n.community,
                n.centroid.x,
                n.centroid.y,
                n.utility,
                n.representative,
                n.members.len()
            );
        }
        for e in &self.edges {
            let _ = writeln!(out, "global_edge {} {} {}", e.a, e.b, e.weight);
        }
        out
    }
}

pub fn build_global_graph(
    graph: &CollisionFreeGraph,
    partition: &Partition,
    retained: &[CommunityId],
) -> Result<GlobalBeliefGraph, CommunityError> {
    if retained.is_empty() {
        return Err(CommunityError::NothingRetained);
    }
    if partition.len() != graph.len() {
        return Err(CommunityError::PartitionMismatch {
            nodes: graph.len(),
            assigned: partition.len(),
        });
    }
    let mut members: BTreeMap<CommunityId, Vec<usize>> =
        retained.iter().map(|&c| (c, Vec::new())).collect();
    for c in retained {
        if *c >= partition.community_count() {
            return Err(CommunityError::UnknownCommunity(*c));
        }
    }
    for i in 0..graph.len() {
        if let Some(list) = members.get_mut(&partition.community_of(i)) {
            list.push(i);
        }
    }
    let nodes: Vec<GlobalNode> = members
        .iter()
        .map(|(&community, idx)| {
            let count = idx.len() as f64;
            let (sx, sy) = idx.iter().fold((0.0, 0.0), |(sx, sy), &i| {
                let p = graph.node_at(i).position;
                (sx + p.x, sy + p.y)
            });
            let centroid = Point::new(sx / count, sy / count);
            let representative = idx
                .iter()
                .map(|&i| graph.node_at(i))
                .min_by(|a, b| {
                    a.position
                        .distance_sq(&centroid)
                        .total_cmp(&b.position.distance_sq(&centroid))
                        .then(a.id.cmp(&b.id))
                })
                .map(|v| v.id)
                .expect("communities are nonempty");
            GlobalNode {
                community,
                centroid,
                utility: idx.iter().map(|&i| graph.node_at(i).utility as u64).sum(),
                representative,
                members: idx.iter().map(|&i| graph.node_at(i).id).collect(),
            }
        })
        .collect();
    let mut best: BTreeMap<(CommunityId, CommunityId), f64> = BTreeMap::new();
    for &(a, b) in graph.edges() {
        let (ia, ib) = (graph.index_of(a).unwrap(), graph.index_of(b).unwrap());
        let (ca, cb) = (partition.community_of(ia), partition.community_of(ib));
        if ca == cb || !members.contains_key(&ca) || !members.contains_key(&cb) {
            continue;
        }
        let len = graph
            .node_at(ia)
            .position
            .distance(&graph.node_at(ib).position);
        let slot = best
            .entry((ca.min(cb), ca.max(cb)))
            .or_insert(f64::INFINITY);
        if len < *slot {
            *slot = len;
        }
    }
    let edges = best
        .into_iter()
        .map(|((a, b), weight)| GlobalEdge { a, b, weight })
        .collect();
    Ok(GlobalBeliefGraph { nodes, edges })
}
