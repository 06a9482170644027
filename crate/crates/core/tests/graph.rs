#![allow(clippy::needless_range_loop)]

mod common;

use std::collections::BTreeSet;

use common::{line_graph, random_edges, rng, segment_clear};
use explore_core::graph::dump::{parse_graph, write_graph};
use explore_core::graph::{
    build_graph, compute_utility, extract_local, nearest_visible_frontier, sample_viewpoints,
    segment_is_free, CollisionFreeGraph, GraphError, Lattice, NodeId, ShortestPaths, UtilityCache,
};
use explore_core::gridworld::{
    detect_frontiers, generate_map, sense_and_update, BeliefCell, FrontierSet, GroundTruthMap,
    MapKind, OccupancyBelief, RangeSensor,
};
use explore_core::Point;
use rand::Rng;

const L_ROOM: [&str; 16] = [
    "################",
    "#......#########",
    "#......#########",
    "#..S...#########",
    "#......#########",
    "#......#########",
    "#..............#",
    "#..............#",
    "#..............#",
    "#......#########",
    "#......#########",
    "#......#########",
    "#......#########",
    "#......#########",
    "#......#########",
    "################",
];

fn partial_belief(truth: &GroundTruthMap, range: f64) -> OccupancyBelief {
    let mut belief = OccupancyBelief::unknown_like(truth);
    sense_and_update(
        &mut belief,
        truth,
        truth.start_pose(),
        RangeSensor { range, rays: 360 },
    )
    .unwrap();
    belief
}

fn brute_utility(p: Point, frontiers: &FrontierSet, belief: &OccupancyBelief, range: f64) -> u32 {
    frontiers
        .points
        .iter()
        .filter(|f| f.distance(&p) <= range && segment_clear(belief, p, **f))
        .count() as u32
}

#[test]
fn utility_matches_brute_force_in_l_room() {
    let truth = GroundTruthMap::from_ascii(&L_ROOM, 0.4).unwrap();
    let belief = partial_belief(&truth, 2.5);
    let frontiers = detect_frontiers(&belief);
    assert!(!frontiers.is_empty());
    let mut positive = 0;
    for range in [1.0, 2.2, 4.0] {
        for y in 0..belief.height() {
            for x in 0..belief.width() {
                if belief.get(x, y) != BeliefCell::Free {
                    continue;
                }
                let p = belief.cell_center(x, y);
                let u = compute_utility(p, &frontiers, &belief, range);
                assert_eq!(
                    u,
                    brute_utility(p, &frontiers, &belief, range),
                    "cell ({x}, {y}) range {range}"
                );
                positive += usize::from(u > 0);
            }
        }
    }
    assert!(positive > 10);
}

#[test]
fn utility_range_is_inclusive() {
    let rows = [
        "##########",
        "#........#",
        "#........#",
        "#........#",
        "##########",
    ];
    let truth = GroundTruthMap::from_ascii(&rows, 1.0).unwrap();
    let belief = OccupancyBelief::fully_known(&truth);
    let p = Point::new(1.5, 2.5);
    let at = |d: f64| FrontierSet {
        cells: vec![(1, 2)],
        points: vec![Point::new(1.5 + d, 2.5)],
    };
    let range = 5.0;
    assert_eq!(compute_utility(p, &at(range), &belief, range), 1);
    assert_eq!(compute_utility(p, &at(range + 1e-6), &belief, range), 0);
    assert_eq!(
        nearest_visible_frontier(p, &at(range), &belief, range),
        Some(range)
    );
    assert_eq!(
        nearest_visible_frontier(p, &at(range + 1e-6), &belief, range),
        None
    );
}

#[test]
fn nearest_visible_frontier_skips_occluded() {
    let truth = GroundTruthMap::from_ascii(&L_ROOM, 0.4).unwrap();
    let belief = partial_belief(&truth, 2.5);
    let frontiers = detect_frontiers(&belief);
    for y in 0..belief.height() {
        for x in 0..belief.width() {
            if belief.get(x, y) != BeliefCell::Free {
                continue;
            }
            let p = belief.cell_center(x, y);
            let oracle = frontiers
                .points
                .iter()
                .filter(|f| f.distance(&p) <= 3.0 && segment_clear(&belief, p, **f))
                .map(|f| f.distance(&p))
                .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.min(d))));
            let got = nearest_visible_frontier(p, &frontiers, &belief, 3.0);
            match (got, oracle) {
                (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12),
                (a, b) => assert_eq!(a, b),
            }
        }
    }
}

#[test]
fn segment_check_matches_oracle() {
    let truth = generate_map(MapKind::Forest, 2, 32, 32, 0.4).unwrap();
    let belief = partial_belief(&truth, 4.0);
    let mut r = rng(21);
    let mut clear = 0;
    for _ in 0..3000 {
        let a = Point::new(r.gen_range(0.0..12.8), r.gen_range(0.0..12.8));
        let b = Point::new(r.gen_range(0.0..12.8), r.gen_range(0.0..12.8));
        let got = segment_is_free(&belief, a, b);
        assert_eq!(got, segment_clear(&belief, a, b), "{a:?} -> {b:?}");
        clear += usize::from(got);
    }
    assert!(clear > 50);
}

#[test]
fn viewpoints_follow_lattice_ids() {
    let truth = generate_map(MapKind::Indoor, 1, 48, 48, 0.4).unwrap();
    let belief = partial_belief(&truth, 6.0);
    let lattice = Lattice::new(&belief, 1.2).unwrap();
    assert_eq!((lattice.cols, lattice.rows), (16, 16));
    let vps = sample_viewpoints(&belief, 1.2).unwrap();
    let mut expected = Vec::new();
    for j in 0..lattice.rows {
        for i in 0..lattice.cols {
            // Host cell of the lattice center, computed directly.
            let (x, y) = (
                ((i as f64 + 0.5) * 1.2 / 0.4) as usize,
                ((j as f64 + 0.5) * 1.2 / 0.4) as usize,
            );
            if belief.get(x, y) == BeliefCell::Free {
                expected.push(((j * 16 + i) as NodeId, belief.cell_center(x, y)));
            }
        }
    }
    let got: Vec<_> = vps.iter().map(|v| (v.id, v.position)).collect();
    assert_eq!(got, expected);
    assert!(vps.iter().all(|v| v.utility == 0));
    assert!(matches!(
        Lattice::new(&belief, 0.2),
        Err(GraphError::InvalidResolution { .. })
    ));
}

/// k nearest by (distance, id), symmetrized, filtered by the slab oracle.
fn brute_edges(
    graph: &CollisionFreeGraph,
    belief: &OccupancyBelief,
    k: usize,
) -> BTreeSet<(NodeId, NodeId)> {
    let nodes = graph.nodes();
    let mut out = BTreeSet::new();
    for a in nodes {
        let mut others: Vec<_> = nodes.iter().filter(|b| b.id != a.id).collect();
        others.sort_by(|p, q| {
            a.position
                .distance_sq(&p.position)
                .total_cmp(&a.position.distance_sq(&q.position))
                .then(p.id.cmp(&q.id))
        });
        for b in others.into_iter().take(k) {
            if segment_clear(belief, a.position, b.position) {
                out.insert((a.id.min(b.id), a.id.max(b.id)));
            }
        }
    }
    out
}

#[test]
fn graph_edges_are_knn_and_collision_free() {
    for (kind, seed) in [
        (MapKind::Indoor, 3),
        (MapKind::Forest, 4),
        (MapKind::Warehouse, 5),
    ] {
        let truth = generate_map(kind, seed, 48, 48, 0.4).unwrap();
        let belief = partial_belief(&truth, 7.0);
        let vps = sample_viewpoints(&belief, 1.2).unwrap();
        for k in [1, 3, 6] {
            let graph = build_graph(&vps, k, &belief, 1.2).unwrap();
            let edges: BTreeSet<_> = graph.edges().iter().copied().collect();
            assert_eq!(edges, brute_edges(&graph, &belief, k), "{kind} k {k}");
            for &(a, b) in graph.edges() {
                assert!(a < b);
                assert!(graph.has_edge(b, a));
            }
        }
    }
    assert_eq!(
        build_graph(&[], 0, &OccupancyBelief::unknown(4, 4, 0.4), 1.2),
        Err(GraphError::InvalidK)
    );
}

#[test]
fn local_window_is_induced_subgraph() {
    let truth = generate_map(MapKind::Warehouse, 8, 64, 64, 0.4).unwrap();
    let belief = OccupancyBelief::fully_known(&truth);
    let graph = build_graph(&sample_viewpoints(&belief, 1.2).unwrap(), 6, &belief, 1.2).unwrap();
    let robot = truth.start_pose();
    let local = extract_local(&graph, robot, 9.6).unwrap();
    let inside = |p: Point| (p.x - robot.x).abs() <= 4.8 && (p.y - robot.y).abs() <= 4.8;
    let ids: Vec<NodeId> = graph
        .nodes()
        .iter()
        .filter(|v| inside(v.position))
        .map(|v| v.id)
        .collect();
    assert_eq!(local.nodes.iter().map(|v| v.id).collect::<Vec<_>>(), ids);
    let edges: Vec<_> = graph
        .edges()
        .iter()
        .filter(|(a, b)| local.contains(*a) && local.contains(*b))
        .copied()
        .collect();
    assert_eq!(local.edges, edges);
    assert!(matches!(
        extract_local(&graph, robot, 2.4),
        Err(GraphError::WindowTooSmall { .. })
    ));
    // A window that misses the nearest node cannot anchor the robot.
    let far = Point::new(robot.x + 0.61, robot.y + 0.61);
    if let Err(e) = extract_local(&graph, far, 2.5) {
        assert_eq!(e, GraphError::EmptyWindow);
    }
}

fn floyd(n: usize, edges: &[(NodeId, NodeId)], pos: impl Fn(usize) -> Point) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(a, b) in edges {
        let (a, b) = (a as usize, b as usize);
        let w = pos(a).distance(&pos(b));
        d[a][b] = d[a][b].min(w);
        d[b][a] = d[b][a].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

#[test]
fn dijkstra_matches_floyd_warshall() {
    let mut r = rng(31);
    for _ in 0..30 {
        let n = r.gen_range(2..14);
        let p = r.gen_range(0.15..0.6);
        let edges: Vec<(NodeId, NodeId)> = random_edges(&mut r, n, p)
            .into_iter()
            .map(|(a, b)| (a as NodeId, b as NodeId))
            .collect();
        let g = line_graph(&vec![0; n], &edges);
        let d = floyd(n, &edges, |i| g.node_at(i).position);
        for s in 0..n {
            let sp = ShortestPaths::from_node(&g, s as NodeId).unwrap();
            for t in 0..n {
                let (got, want) = (sp.distance_to(&g, t as NodeId), d[s][t]);
                assert!(
                    got == want || (got - want).abs() < 1e-9,
                    "{s}->{t}: {got} vs {want}"
                );
                match sp.path_to(&g, t as NodeId) {
                    Some(path) => {
                        assert_eq!((path[0], *path.last().unwrap()), (s as NodeId, t as NodeId));
                        let len: f64 = path
                            .windows(2)
                            .map(|w| {
                                assert!(g.has_edge(w[0], w[1]));
                                g.node(w[0])
                                    .unwrap()
                                    .position
                                    .distance(&g.node(w[1]).unwrap().position)
                            })
                            .sum();
                        assert!((len - want).abs() < 1e-9);
                    }
                    None => assert!(want.is_infinite()),
                }
            }
        }
        // Seeded multi-source equals the minimum over offset single sources.
        let mut seeds = Vec::new();
        for i in 0..n {
            if r.gen_bool(0.4) {
                seeds.push((i, r.gen_range(0.0..3.0)));
            }
        }
        let multi = ShortestPaths::from_seeds(&g, &seeds);
        for t in 0..n {
            let want = seeds
                .iter()
                .map(|&(s, o)| o + d[s][t])
                .fold(f64::INFINITY, f64::min);
            assert!(multi.dist[t] == want || (multi.dist[t] - want).abs() < 1e-9);
        }
    }
}

#[test]
fn utility_cache_matches_full_recompute() {
    let truth = generate_map(MapKind::Indoor, 6, 48, 48, 0.4).unwrap();
    let mut belief = OccupancyBelief::unknown_like(&truth);
    let mut cache = UtilityCache::new();
    let mut r = rng(41);
    let range = 5.4;
    let mut pose = truth.start_pose();
    for _ in 0..15 {
        let report = sense_and_update(&mut belief, &truth, pose, RangeSensor::default()).unwrap();
        let frontiers = detect_frontiers(&belief);
        let vps = sample_viewpoints(&belief, 1.2).unwrap();
        let nodes: Vec<(NodeId, Point)> = vps.iter().map(|v| (v.id, v.position)).collect();
        cache.refresh(&nodes, &report.revealed, &frontiers, &belief, range);
        for (id, p) in &nodes {
            assert_eq!(
                cache.get(*id),
                Some(compute_utility(*p, &frontiers, &belief, range))
            );
        }
        pose = nodes[r.gen_range(0..nodes.len())].1;
    }
}

#[test]
fn graph_dump_roundtrips() {
    let truth = generate_map(MapKind::Forest, 9, 32, 32, 0.4).unwrap();
    let belief = partial_belief(&truth, 6.0);
    let mut graph =
        build_graph(&sample_viewpoints(&belief, 1.2).unwrap(), 6, &belief, 1.2).unwrap();
    graph.set_utilities(|id| id % 7);
    let text = write_graph(&graph);
    let back = parse_graph(&text).unwrap();
    assert_eq!(back, graph);
    assert_eq!(write_graph(&back), text);
    assert!(parse_graph("k 6\nnode_resolution 1.2\nedge 1 2\n").is_err());
}
