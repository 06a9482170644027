//! Louvain modularity maximization: greedy local moves followed by
//! aggregation, repeated until no move improves modularity.
//!
//! Nodes are visited in ascending index order and candidate communities in
//! ascending id order, so results are reproducible.

use std::collections::BTreeMap;

use super::{Partition, Topology};

/// Minimum gain for a move to count as an improvement.
const GAIN_EPS: f64 = 1e-12;

/// Weighted graph at one aggregation level. `loops[i]` holds `A_ii`.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    loops: Vec<f64>,
}

impl Level {
    fn degree(&self, i: usize) -> f64 {
        self.loops[i] + self.adj[i].iter().map(|(_, w)| w).sum::<f64>()
    }
}

/// Moves nodes between communities while modularity strictly increases.
/// Returns the assignment and whether anything moved.
fn local_moves(level: &Level, two_m: f64) -> (Vec<usize>, bool) {
    let n = level.adj.len();
    let degree: Vec<f64> = (0..n).map(|i| level.degree(i)).collect();
    let mut community: Vec<usize> = (0..n).collect();
    let mut total: Vec<f64> = degree.clone();
    let mut moved_any = false;
    loop {
        let mut moved = false;
        for i in 0..n {
            let own = community[i];
            let k_i = degree[i];
            // Edge weight from i into each neighbouring community.
            let mut links: BTreeMap<usize, f64> = BTreeMap::new();
            for &(j, w) in &level.adj[i] {
                *links.entry(community[j]).or_insert(0.0) += w;
            }
            total[own] -= k_i;
            let gain = |c: usize, k_in: f64| k_in - total[c] * k_i / two_m;
            let own_gain = gain(own, links.get(&own).copied().unwrap_or(0.0));
            let mut best = (own, own_gain);
            for (&c, &k_in) in &links {
                if c == own {
                    continue;
                }
                let g = gain(c, k_in);
                if g > best.1 + GAIN_EPS {
                    best = (c, g);
                }
            }
            total[best.0] += k_i;
            if best.0 != own {
                community[i] = best.0;
                moved = true;
                moved_any = true;
            }
        }
        if !moved {
            break;
        }
    }
    (community, moved_any)
}

/// Relabels communities densely in order of their smallest member.
fn densify(assignment: &mut [usize]) -> usize {
    let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
    let mut next = 0;
    for c in assignment.iter_mut() {
        let id = *remap.entry(*c).or_insert_with(|| {
            next += 1;
            next - 1
        });
        *c = id;
    }
    next
}

fn aggregate(level: &Level, assignment: &[usize], count: usize) -> Level {
    let mut loops = vec![0.0; count];
    let mut links: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); count];
    for (i, neighbors) in level.adj.iter().enumerate() {
        let ci = assignment[i];
        loops[ci] += level.loops[i];
        for &(j, w) in neighbors {
            let cj = assignment[j];
            if ci == cj {
                loops[ci] += w;
            } else {
                *links[ci].entry(cj).or_insert(0.0) += w;
            }
        }
    }
    Level {
        adj: links.into_iter().map(|m| m.into_iter().collect()).collect(),
        loops,
    }
}

/// Detects communities on an unweighted graph. Isolated nodes stay singletons.
pub fn detect_communities(topology: &Topology) -> Partition {
    let n = topology.node_count();
    let m = topology.edge_count();
    if m == 0 {
        return Partition::new((0..n).collect()).expect("singletons are dense");
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in topology.edges() {
        adj[a].push((b, 1.0));
        adj[b].push((a, 1.0));
    }
    for list in &mut adj {
        list.sort_by_key(|(j, _)| *j);
    }
    let mut level = Level {
        adj,
        loops: vec![0.0; n],
    };
    let two_m = 2.0 * m as f64;
    let mut membership: Vec<usize> = (0..n).collect();
    loop {
        let (mut assignment, moved) = local_moves(&level, two_m);
        if !moved {
            break;
        }
        let count = densify(&mut assignment);
        for c in membership.iter_mut() {
            *c = assignment[*c];
        }
        if count == level.adj.len() {
            break;
        }
        level = aggregate(&level, &assignment, count);
    }
    densify(&mut membership);
    Partition::new(membership).expect("louvain output is dense")
}
