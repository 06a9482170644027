//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};

use explore_core::community::{Partition, Topology};
use explore_core::fast::{InformativeGraph, LayerParams, Matrix};
use explore_core::graph::{CollisionFreeGraph, NodeId, Viewpoint};
use explore_core::gridworld::{BeliefCell, OccupancyBelief};
use explore_core::Point;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdos-Renyi edge list on `n` nodes.
pub fn random_edges(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// Uniform random labels, relabelled densely in order of first appearance.
pub fn random_assignment(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let k = rng.gen_range(1..=n);
    dense((0..n).map(|_| rng.gen_range(0..k)).collect())
}

pub fn dense(labels: Vec<usize>) -> Vec<usize> {
    let mut map = BTreeMap::new();
    labels
        .into_iter()
        .map(|l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Double-sum modularity over all ordered node pairs:
/// `Q = 1/2m sum_ij [A_ij - k_i k_j / 2m] delta(c_i, c_j)`.
pub fn brute_modularity(n: usize, edges: &[(usize, usize)], labels: &[usize]) -> f64 {
    let mut a = vec![vec![0.0; n]; n];
    for &(i, j) in edges {
        a[i][j] = 1.0;
        a[j][i] = 1.0;
    }
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Brute-force per-community term `sum_{i,j in c} [A_ij - k_i k_j / 2m]`.
pub fn brute_community_q(n: usize, edges: &[(usize, usize)], labels: &[usize], c: usize) -> f64 {
    let mut a = vec![vec![0.0; n]; n];
    for &(i, j) in edges {
        a[i][j] = 1.0;
        a[j][i] = 1.0;
    }
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == c && labels[j] == c {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q
}

pub fn topology(n: usize, edges: &[(usize, usize)]) -> Topology {
    Topology::new(n, edges.iter().copied()).unwrap()
}

pub fn partition(labels: &[usize]) -> Partition {
    Partition::new(labels.to_vec()).unwrap()
}

/// Same grouping up to relabelling.
pub fn same_grouping(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len()
        && (0..a.len()).all(|i| (0..a.len()).all(|j| (a[i] == a[j]) == (b[i] == b[j])))
}

/// Viewpoint graph with ids `0..n` on a line, arbitrary edges.
pub fn line_graph(utilities: &[u32], edges: &[(NodeId, NodeId)]) -> CollisionFreeGraph {
    let nodes = utilities
        .iter()
        .enumerate()
        .map(|(i, &u)| Viewpoint {
            id: i as NodeId,
            position: Point::new(i as f64 * 1.2 + 0.6, 0.6),
            utility: u,
        })
        .collect();
    CollisionFreeGraph::from_parts(nodes, edges.iter().copied(), 6, 1.2).unwrap()
}

/// Entry and exit parameters of the ray `p + t d` through an axis-aligned
/// square, by slabs. Touching a corner counts as a hit.
pub fn slab(p: Point, d: (f64, f64), lo: (f64, f64), hi: (f64, f64)) -> Option<(f64, f64)> {
    let mut t0 = 0.0f64;
    let mut t1 = f64::INFINITY;
    for (o, dd, a, b) in [(p.x, d.0, lo.0, hi.0), (p.y, d.1, lo.1, hi.1)] {
        if dd == 0.0 {
            if o < a || o > b {
                return None;
            }
        } else {
            let (u, v) = ((a - o) / dd, (b - o) / dd);
            t0 = t0.max(u.min(v));
            t1 = t1.min(u.max(v));
        }
    }
    (t0 <= t1 + 1e-9).then_some((t0, t1))
}

/// Line of sight by checking every cell square against the closed segment.
pub fn segment_clear(belief: &OccupancyBelief, a: Point, b: Point) -> bool {
    let res = belief.resolution();
    let len = a.distance(&b);
    if len == 0.0 {
        return belief.is_free_at(a);
    }
    let d = ((b.x - a.x) / len, (b.y - a.y) / len);
    let (x0, x1) = (
        (a.x.min(b.x) / res).floor() as i64 - 1,
        (a.x.max(b.x) / res).floor() as i64 + 1,
    );
    let (y0, y1) = (
        (a.y.min(b.y) / res).floor() as i64 - 1,
        (a.y.max(b.y) / res).floor() as i64 + 1,
    );
    for cy in y0..=y1 {
        for cx in x0..=x1 {
            let lo = (cx as f64 * res, cy as f64 * res);
            let hit =
                slab(a, d, lo, (lo.0 + res, lo.1 + res)).is_some_and(|(t0, _)| t0 <= len + 1e-9);
            let free = cx >= 0
                && cy >= 0
                && (cx as usize) < belief.width()
                && (cy as usize) < belief.height()
                && belief.get(cx as usize, cy as usize) == BeliefCell::Free;
            if hit && !free {
                return false;
            }
        }
    }
    true
}

pub fn random_matrix(r: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_rows(
        &(0..rows)
            .map(|_| (0..cols).map(|_| r.gen_range(-1.0..1.0)).collect())
            .collect::<Vec<_>>(),
    )
}

/// Dense 0/1 mask with self-loops, 0 meaning permitted.
pub fn random_mask(r: &mut impl Rng, n: usize) -> Vec<Vec<u8>> {
    let mut m = vec![vec![1u8; n]; n];
    for i in 0..n {
        m[i][i] = 0;
        for j in i + 1..n {
            if r.gen_bool(0.4) {
                m[i][j] = 0;
                m[j][i] = 0;
            }
        }
    }
    m
}

/// Direct evaluation of the masked attention formulas, one scalar at a time.
pub fn scalar_reference(
    h: &Matrix,
    m: &[Vec<u8>],
    p: &LayerParams,
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let (n, d) = (h.rows, h.cols);
    let proj = |w: &Matrix, i: usize| -> Vec<f64> {
        (0..d)
            .map(|o| (0..d).map(|c| w.get(o, c) * h.get(i, c)).sum())
            .collect()
    };
    let q: Vec<Vec<f64>> = (0..n).map(|i| proj(&p.wq, i)).collect();
    let k: Vec<Vec<f64>> = (0..n).map(|i| proj(&p.wk, i)).collect();
    let v: Vec<Vec<f64>> = (0..n).map(|i| proj(&p.wv, i)).collect();
    let mut w = vec![vec![0.0; n]; n];
    let mut out = vec![vec![0.0; d]; n];
    for i in 0..n {
        let u: Vec<f64> = (0..n)
            .map(|j| q[i].iter().zip(&k[j]).map(|(a, b)| a * b).sum::<f64>() / (d as f64).sqrt())
            .collect();
        let denom: f64 = (0..n).map(|j| u[j].exp() * f64::from(1 - m[i][j])).sum();
        for j in 0..n {
            w[i][j] = u[j].exp() * f64::from(1 - m[i][j]) / denom;
            for c in 0..d {
                out[i][c] += w[i][j] * v[j][c];
            }
        }
    }
    (w, out)
}

/// Five nodes on a pentagon with one chord.
pub fn five_node_graph(r: &mut impl Rng, current: usize) -> InformativeGraph {
    let positions: Vec<Point> = (0..5)
        .map(|i| {
            let a = i as f64 * std::f64::consts::TAU / 5.0;
            Point::new(a.cos(), a.sin())
        })
        .collect();
    InformativeGraph {
        ids: vec![10, 11, 12, 13, 14],
        features: positions
            .iter()
            .map(|p| {
                [
                    p.x,
                    p.y,
                    r.gen_range(0.0..1.0),
                    f64::from(u8::from(r.gen_bool(0.4))),
                ]
            })
            .collect(),
        positions,
        visited: (0..5).map(|i| i == current || r.gen_bool(0.3)).collect(),
        edges: vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)],
        current,
    }
}

/// Sort-everything oracle for top-k pruning. Ranks on the exact integer
/// `2m * sum_{i,j in c} A_ij - (sum_{i in c} k_i)^2` to keep ties exact.
pub fn prune_oracle(
    n: usize,
    edges: &[(usize, usize)],
    labels: &[usize],
    utilities: &[u32],
    k_top: usize,
    robot: usize,
) -> Vec<usize> {
    let c_count = labels.iter().max().unwrap() + 1;
    let mut deg = vec![0i64; n];
    for &(a, b) in edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    let two_m = 2 * edges.len() as i64;
    let mut rows = Vec::new();
    for c in 0..c_count {
        let internal = edges
            .iter()
            .filter(|(a, b)| labels[*a] == c && labels[*b] == c)
            .count() as i64
            * 2;
        let tot: i64 = (0..n).filter(|&i| labels[i] == c).map(|i| deg[i]).sum();
        let util: u64 = (0..n)
            .filter(|&i| labels[i] == c)
            .map(|i| utilities[i] as u64)
            .sum();
        rows.push((two_m * internal - tot * tot, util, c));
    }
    rows.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));
    let mut keep: BTreeSet<usize> = rows.iter().take(k_top).map(|r| r.2).collect();
    for i in 0..n {
        if utilities[i] > 0 || i == robot {
            keep.insert(labels[i]);
        }
    }
    keep.into_iter().collect()
}
