//! Text dump of a collision-free graph.
//!
//! ```text
//! k 6
//! node_resolution 1.2
//! node 17 2.2 0.6 4
//! edge 17 18
//! ```

use std::fmt::Write as _;

use super::collision::CollisionFreeGraph;
use super::viewpoints::Viewpoint;
use super::GraphError;
use crate::geometry::Point;

pub fn write_graph(graph: &CollisionFreeGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "k {}", graph.k);
    let _ = writeln!(out, "node_resolution {}", graph.node_resolution);
    for n in graph.nodes() {
        let _ = writeln!(
            out,
            "node {} {} {} {}",
            n.id, n.position.x, n.position.y, n.utility
        );
    }
    for (a, b) in graph.edges() {
        let _ = writeln!(out, "edge {a} {b}");
    }
    out
}

pub fn parse_graph(text: &str) -> Result<CollisionFreeGraph, GraphError> {
    let bad = |line: &str| GraphError::Parse(format!("malformed line `{line}`"));
    let mut k = None;
    let mut node_resolution = None;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("k") => k = parts.next().and_then(|v| v.parse().ok()),
            Some("node_resolution") => node_resolution = parts.next().and_then(|v| v.parse().ok()),
            Some("node") => {
                let f: Vec<&str> = parts.collect();
                if f.len() != 4 {
                    return Err(bad(line));
                }
                nodes.push(Viewpoint {
                    id: f[0].parse().map_err(|_| bad(line))?,
                    position: Point::new(
                        f[1].parse().map_err(|_| bad(line))?,
                        f[2].parse().map_err(|_| bad(line))?,
                    ),
                    utility: f[3].parse().map_err(|_| bad(line))?,
                });
            }
            Some("edge") => {
                let f: Vec<&str> = parts.collect();
                if f.len() != 2 {
                    return Err(bad(line));
                }
                edges.push((
                    f[0].parse().map_err(|_| bad(line))?,
                    f[1].parse().map_err(|_| bad(line))?,
                ));
            }
            _ => return Err(bad(line)),
        }
    }
    let k = k.ok_or_else(|| GraphError::Parse("missing `k` line".into()))?;
    let node_resolution = node_resolution
        .ok_or_else(|| GraphError::Parse("missing `node_resolution` line".into()))?;
    CollisionFreeGraph::from_parts(nodes, edges, k, node_resolution)
}
