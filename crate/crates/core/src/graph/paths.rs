use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::collision::CollisionFreeGraph;
use super::NodeId;

#[derive(PartialEq)]
struct Entry {
    dist: f64,
    idx: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single- or multi-source Dijkstra over Euclidean edge lengths.
#[derive(Clone, Debug)]
pub struct ShortestPaths {
    /// Distance per node index; infinite when unreachable.
    pub dist: Vec<f64>,
    prev: Vec<Option<usize>>,
}

impl ShortestPaths {
    pub fn from_sources(graph: &CollisionFreeGraph, sources: &[usize]) -> Self {
        let seeds: Vec<(usize, f64)> = sources.iter().map(|&s| (s, 0.0)).collect();
        Self::from_seeds(graph, &seeds)
    }

    /// Multi-source Dijkstra where each source starts at its own offset.
    pub fn from_seeds(graph: &CollisionFreeGraph, seeds: &[(usize, f64)]) -> Self {
        let n = graph.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![None; n];
        let mut heap = BinaryHeap::new();
        for &(s, d0) in seeds {
            if d0 < dist[s] {
                dist[s] = d0;
                heap.push(Entry { dist: d0, idx: s });
            }
        }
        while let Some(Entry { dist: d, idx }) = heap.pop() {
            if d > dist[idx] {
                continue;
            }
            let p = graph.node_at(idx).position;
            for &nb in graph.neighbors_of_index(idx) {
                let nd = d + p.distance(&graph.node_at(nb).position);
                if nd < dist[nb] {
                    dist[nb] = nd;
                    prev[nb] = Some(idx);
                    heap.push(Entry { dist: nd, idx: nb });
                }
            }
        }
        Self { dist, prev }
    }

    pub fn from_node(graph: &CollisionFreeGraph, source: NodeId) -> Option<Self> {
        graph
            .index_of(source)
            .map(|s| Self::from_sources(graph, &[s]))
    }

    pub fn distance_to(&self, graph: &CollisionFreeGraph, id: NodeId) -> f64 {
        graph
            .index_of(id)
            .map(|i| self.dist[i])
            .unwrap_or(f64::INFINITY)
    }

    /// Node ids from the source to `target`, inclusive; `None` if unreachable.
    pub fn path_to(&self, graph: &CollisionFreeGraph, target: NodeId) -> Option<Vec<NodeId>> {
        let mut idx = graph.index_of(target)?;
        if !self.dist[idx].is_finite() {
            return None;
        }
        let mut out = vec![graph.node_at(idx).id];
        while let Some(p) = self.prev[idx] {
            out.push(graph.node_at(p).id);
            idx = p;
        }
        out.reverse();
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heap_pops_nearest_then_smallest_index() {
        let mut heap = BinaryHeap::new();
        for (dist, idx) in [(2.0, 0), (1.0, 5), (1.0, 3), (0.5, 9)] {
            heap.push(Entry { dist, idx });
        }
        let order: Vec<usize> = std::iter::from_fn(|| heap.pop().map(|e| e.idx)).collect();
        assert_eq!(order, vec![9, 3, 5, 0]);
    }
}
