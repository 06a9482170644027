//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any asserted criterion fails.

#![allow(clippy::needless_range_loop)]

mod common;

use std::time::{Duration, Instant};

use common::*;
use explore_core::community::{detect_communities, modularity, prune_topk, Partition};
use explore_core::fast::{
    attention_layer, attention_weights, batch_loss, batch_loss_gradient, instruction_reward,
    masked_attention, train_policy, AttentionMask, LayerParams, Matrix, PolicyParams, Sample,
    SelectionMode, TrainConfig,
};
use explore_core::gridworld::MapKind;
use explore_core::mission::{benchmark, run_episode, LocalPolicy, MapSpec, Method, MissionConfig};
use rand::seq::SliceRandom;
use rand::Rng;

// Pinned tolerances.
const MODULARITY_TOL: f64 = 1e-12;
const MODULARITY_BUDGET: Duration = Duration::from_secs(1);
const ATTENTION_TOL: f64 = 1e-9;
const R_DEV_HALF: f64 = -0.37754;
const R_DEV_TOL: f64 = 1e-5;
const GRAD_REL_TOL: f64 = 1e-4;
const GRAD_EPS: f64 = 1e-5;
const STEP_RATIO: f64 = 4.0;
const CLOSED_LOOP_BUDGET: Duration = Duration::from_secs(120);
const WIN_SHARE: f64 = 0.6;
const TRAIN_BUDGET: Duration = Duration::from_secs(600);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn modularity_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(101);
    let mut worst: f64 = 0.0;
    let mut graphs = 0;
    while graphs < 100 {
        let n = r.gen_range(4..=12);
        let p = r.gen_range(0.3..=0.7);
        let edges = random_edges(&mut r, n, p);
        if edges.is_empty() {
            continue;
        }
        let labels = random_assignment(&mut r, n);
        let q = modularity(&topology(n, &edges), &partition(&labels)).unwrap();
        worst = worst.max((q - brute_modularity(n, &edges, &labels)).abs());
        graphs += 1;
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= MODULARITY_TOL && elapsed < MODULARITY_BUDGET,
        format!("max |diff| {worst:.1e} over {graphs} graphs in {elapsed:.2?}"),
    )
}

fn modularity_fixtures() -> Outcome {
    let triangles = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)];
    let tri = [(0, 1), (1, 2), (0, 2)];
    let cases = [
        (
            "two triangles",
            modularity(&topology(6, &triangles), &partition(&[0, 0, 0, 1, 1, 1])).unwrap(),
            brute_modularity(6, &triangles, &[0, 0, 0, 1, 1, 1]),
            0.5,
        ),
        (
            "triangle singletons",
            modularity(&topology(3, &tri), &Partition::singletons(3)).unwrap(),
            brute_modularity(3, &tri, &[0, 1, 2]),
            -1.0 / 3.0,
        ),
        (
            "one community",
            modularity(&topology(6, &triangles), &Partition::single(6)).unwrap(),
            brute_modularity(6, &triangles, &[0; 6]),
            0.0,
        ),
    ];
    let pass = cases.iter().all(|(_, q, brute, want)| {
        (q - want).abs() <= MODULARITY_TOL && (brute - want).abs() <= MODULARITY_TOL
    });
    let detail: Vec<String> = cases
        .iter()
        .map(|(name, q, _, _)| format!("{name} {q:.6}"))
        .collect();
    outcome(pass, detail.join(", "))
}

fn louvain_quality() -> Outcome {
    let mut r = rng(103);
    let mut beaten = 0;
    let mut graphs = 0;
    while graphs < 50 {
        let n = r.gen_range(4..=20);
        let p = r.gen_range(0.15..0.6);
        let edges = random_edges(&mut r, n, p);
        if edges.is_empty() {
            continue;
        }
        let t = topology(n, &edges);
        let q = modularity(&t, &detect_communities(&t)).unwrap();
        if q >= modularity(&t, &Partition::single(n)).unwrap()
            && q >= modularity(&t, &Partition::singletons(n)).unwrap()
        {
            beaten += 1;
        }
        graphs += 1;
    }
    let mut edges = Vec::new();
    for base in [0, 6] {
        for a in 0..6 {
            for b in a + 1..6 {
                edges.push((base + a, base + b));
            }
        }
    }
    edges.push((5, 6));
    let found = detect_communities(&topology(12, &edges));
    let planted = same_grouping(found.assignment(), &[0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1]);
    outcome(
        beaten == graphs && planted,
        format!(
            "{beaten}/{graphs} beat both trivial partitions, planted split recovered: {planted}"
        ),
    )
}

fn pruning() -> Outcome {
    let mut r = rng(104);
    let mut matched = 0;
    let mut graphs = 0;
    let mut tied = 0;
    while graphs < 50 {
        let n = r.gen_range(6..=16);
        let edges = random_edges(&mut r, n, 0.35);
        if edges.is_empty() {
            continue;
        }
        let labels = dense((0..n).map(|_| r.gen_range(0..5)).collect());
        let utilities: Vec<u32> = (0..n)
            .map(|_| {
                if r.gen_bool(0.15) {
                    r.gen_range(1..3)
                } else {
                    0
                }
            })
            .collect();
        let k_top = r.gen_range(1..=3);
        let robot = r.gen_range(0..n);
        let graph = line_graph(
            &utilities,
            &edges
                .iter()
                .map(|&(a, b)| (a as u32, b as u32))
                .collect::<Vec<_>>(),
        );
        let part = partition(&labels);
        let kept = prune_topk(&graph, &part, k_top, &[robot as u32]).unwrap();
        if kept == prune_oracle(n, &edges, &labels, &utilities, k_top, robot) {
            matched += 1;
        }
        let scores =
            explore_core::community::community_scores(&topology(n, &edges), &part).unwrap();
        let mut qs: Vec<f64> = scores.iter().map(|s| s.q).collect();
        qs.sort_by(f64::total_cmp);
        if qs.windows(2).any(|w| w[0] == w[1]) {
            tied += 1;
        }
        graphs += 1;
    }
    outcome(
        matched == graphs && tied > 0,
        format!("{matched}/{graphs} match the sort oracle ({tied} with tied Q)"),
    )
}

fn attention() -> Outcome {
    let mut r = rng(105);
    let mut worst: f64 = 0.0;
    let mut masked_nonzero = 0;
    let mut worst_row: f64 = 0.0;
    let mut equivariant = true;
    for _ in 0..20 {
        let n = r.gen_range(2..=8);
        let d = r.gen_range(1..=8);
        let h = random_matrix(&mut r, n, d);
        let m = random_mask(&mut r, n);
        let mask = AttentionMask::from_dense(&m);
        let p = LayerParams {
            wq: random_matrix(&mut r, d, d),
            wk: random_matrix(&mut r, d, d),
            wv: random_matrix(&mut r, d, d),
        };
        let (w_ref, out_ref) = scalar_reference(&h, &m, &p);
        let w = attention_weights(&h, &mask, &p).unwrap();
        let out = masked_attention(&h, &mask, &p).unwrap();
        for i in 0..n {
            worst_row = worst_row.max((w.row(i).iter().sum::<f64>() - 1.0).abs());
            for j in 0..n {
                worst = worst.max((w.get(i, j) - w_ref[i][j]).abs());
                if m[i][j] == 1 && w.get(i, j) != 0.0 {
                    masked_nonzero += 1;
                }
            }
            for c in 0..d {
                worst = worst.max((out.get(i, c) - out_ref[i][c]).abs());
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let hp = Matrix::from_rows(&perm.iter().map(|&i| h.row(i).to_vec()).collect::<Vec<_>>());
        let mp: Vec<Vec<u8>> = perm
            .iter()
            .map(|&i| perm.iter().map(|&j| m[i][j]).collect())
            .collect();
        let a = attention_layer(&h, &mask, &p).unwrap();
        let b = attention_layer(&hp, &AttentionMask::from_dense(&mp), &p).unwrap();
        let wb = attention_weights(&hp, &AttentionMask::from_dense(&mp), &p).unwrap();
        for (i, &pi) in perm.iter().enumerate() {
            equivariant &= b.row(i) == a.row(pi);
            for (j, &pj) in perm.iter().enumerate() {
                equivariant &= wb.get(i, j) == w.get(pi, pj);
            }
        }
    }
    outcome(
        worst <= ATTENTION_TOL && worst_row <= ATTENTION_TOL && masked_nonzero == 0 && equivariant,
        format!(
            "max |diff| {worst:.1e}, max |row sum - 1| {worst_row:.1e}, nonzero masked {masked_nonzero}, exact equivariance {equivariant}"
        ),
    )
}

fn reward() -> Outcome {
    let r0 = instruction_reward(0.0).unwrap();
    let r1 = instruction_reward(1.0).unwrap();
    let half = instruction_reward(0.5).unwrap();
    let samples: Vec<f64> = (0..1000)
        .map(|i| instruction_reward(i as f64 / 999.0).unwrap())
        .collect();
    let monotone = samples.windows(2).all(|w| w[1] < w[0]);
    outcome(
        r0 == 0.0 && r1 == -1.0 && (half - R_DEV_HALF).abs() <= R_DEV_TOL && monotone,
        format!("r(0) {r0}, r(1) {r1}, r(0.5) {half:.6}, strictly decreasing over 1000 samples: {monotone}"),
    )
}

fn gradient() -> Outcome {
    let mut r = rng(107);
    let params = PolicyParams::random(16, 2, 17);
    let samples: Vec<Sample> = (0..4)
        .map(|i| {
            let graph = five_node_graph(&mut r, [0, 1, 2, 4][i]);
            let n = graph.current_neighbors().len();
            Sample {
                graph,
                action: r.gen_range(0..n),
                advantage: r.gen_range(-2.0..2.0),
            }
        })
        .collect();
    let (_, grad) = batch_loss_gradient(&params, &samples).unwrap();
    let analytic: Vec<f64> = grad
        .named()
        .iter()
        .flat_map(|(_, m)| m.data.clone())
        .collect();
    let (mut diff2, mut norm2, mut k) = (0.0, 0.0, 0);
    for t in 0..params.named().len() {
        for i in 0..params.named()[t].1.data.len() {
            let mut plus = params.clone();
            plus.tensors_mut()[t].data[i] += GRAD_EPS;
            let mut minus = params.clone();
            minus.tensors_mut()[t].data[i] -= GRAD_EPS;
            let fd = (batch_loss(&plus, &samples).unwrap() - batch_loss(&minus, &samples).unwrap())
                / (2.0 * GRAD_EPS);
            diff2 += (fd - analytic[k]).powi(2);
            norm2 += fd.powi(2).max(analytic[k].powi(2));
            k += 1;
        }
    }
    let rel = (diff2 / norm2).sqrt();
    outcome(
        rel <= GRAD_REL_TOL,
        format!("relative error {rel:.2e} over {k} parameters"),
    )
}

fn paper_map(kind: MapKind) -> MissionConfig {
    MissionConfig {
        map: MapSpec {
            kind,
            width: 64,
            height: 64,
            resolution: 0.4,
            ..MapSpec::default()
        },
        policy: LocalPolicy::Heuristic,
        ..MissionConfig::default()
    }
}

fn closed_loop() -> Outcome {
    let start = Instant::now();
    let configs: Vec<MissionConfig> = [MapKind::Indoor, MapKind::Forest, MapKind::Warehouse]
        .into_iter()
        .map(paper_map)
        .collect();
    let report = benchmark(&configs, &[Method::Guided, Method::Greedy], 20).unwrap();
    let elapsed = start.elapsed();
    let mut failures = Vec::new();
    let mut ratios = Vec::new();
    for cfg in &configs {
        let kind = cfg.map.kind;
        let mut worst: f64 = 0.0;
        for seed in 0..20 {
            let find = |m: Method| {
                report
                    .episodes
                    .iter()
                    .find(|e| {
                        e.method == m && e.seed == seed && e.config.starts_with(kind.as_str())
                    })
                    .unwrap()
            };
            let (g, b) = (find(Method::Guided), find(Method::Greedy));
            let ratio = g.steps as f64 / b.steps.max(1) as f64;
            worst = worst.max(ratio);
            if !g.complete || ratio > STEP_RATIO {
                failures.push(format!("{kind} seed {seed}"));
            }
        }
        ratios.push(format!("{kind} {worst:.2}"));
    }
    outcome(
        failures.is_empty() && elapsed < CLOSED_LOOP_BUDGET,
        format!(
            "60 maps, incomplete or over {STEP_RATIO}x: {:?}; worst guided/greedy step ratio {}; {elapsed:.1?}",
            failures,
            ratios.join(", ")
        ),
    )
}

fn directional_efficiency() -> Outcome {
    let report = benchmark(
        &[paper_map(MapKind::Warehouse)],
        &[Method::Guided, Method::Greedy],
        30,
    )
    .unwrap();
    let dist = |m: Method| -> Vec<f64> {
        report
            .episodes
            .iter()
            .filter(|e| e.method == m)
            .map(|e| e.distance)
            .collect()
    };
    let (g, b) = (dist(Method::Guided), dist(Method::Greedy));
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let wins = g.iter().zip(&b).filter(|(x, y)| x <= y).count();
    let share = wins as f64 / g.len() as f64;
    outcome(
        mean(&g) <= mean(&b) && share >= WIN_SHARE,
        format!(
            "guided mean {:.1} m vs greedy {:.1} m, guided wins {wins}/{}",
            mean(&g),
            mean(&b),
            g.len()
        ),
    )
}

fn training() -> Outcome {
    let start = Instant::now();
    let tc = TrainConfig {
        iterations: 200,
        map_size: 20,
        ..TrainConfig::default()
    };
    let report = train_policy(&tc).unwrap();
    let elapsed = start.elapsed();
    let (first, last) = (&report.rows[0], report.rows.last().unwrap());
    let finite =
        report.rows.iter().all(|r| {
            r.mean_return.is_finite() && r.smoothed_return.is_finite() && r.loss.is_finite()
        }) && report.params.named().iter().all(|(_, m)| m.is_finite());
    outcome(
        report.rows.len() == 200
            && last.smoothed_return >= first.smoothed_return
            && last.smoothed_return >= first.mean_return
            && finite
            && elapsed < TRAIN_BUDGET,
        format!(
            "smoothed return {:.3} at iteration 1 (raw {:.3}) -> {:.3} at {}, finite {finite}, {elapsed:.1?}",
            first.smoothed_return, first.mean_return, last.smoothed_return, last.iteration
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("policy.ckpt");
    std::fs::write(&ckpt, PolicyParams::random(16, 2, 5).to_checkpoint()).unwrap();
    let base = MissionConfig {
        map: MapSpec {
            kind: MapKind::Warehouse,
            seed: 3,
            ..MapSpec::default()
        },
        ..MissionConfig::default()
    };
    let network = MissionConfig {
        policy: LocalPolicy::Network,
        checkpoint: Some(ckpt.to_string_lossy().into_owned()),
        selection: SelectionMode::Greedy,
        step_cap: 150,
        ..base.clone()
    };
    let greedy = MissionConfig {
        method: Method::Greedy,
        ..base.clone()
    };
    let in_pool = |threads: usize, cfg: &MissionConfig| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_episode(cfg).unwrap().to_jsonl())
    };
    let mut identical = true;
    let mut bytes = 0;
    for cfg in [&base, &network, &greedy] {
        let a = run_episode(cfg).unwrap().to_jsonl();
        identical &= a == run_episode(cfg).unwrap().to_jsonl();
        identical &= a == in_pool(1, cfg) && a == in_pool(4, cfg);
        bytes += a.len();
    }
    let bench = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                benchmark(
                    std::slice::from_ref(&base),
                    &[Method::Guided, Method::Greedy],
                    3,
                )
                .unwrap()
                .to_csv()
            })
    };
    identical &= bench(1) == bench(4);
    outcome(identical, format!("3 configs ({bytes} log bytes) identical across 2 runs and 1/4 threads, bench CSV identical: {identical}"))
}

/// (name, runner, asserted)
type Criterion = (&'static str, fn() -> Outcome, bool);

fn main() {
    // Directional efficiency is reported but not asserted; see the README.
    let criteria: [Criterion; 11] = [
        ("modularity oracle equivalence", modularity_oracle, true),
        ("fixed-value modularity", modularity_fixtures, true),
        ("louvain quality", louvain_quality, true),
        ("pruning correctness", pruning, true),
        ("attention correctness", attention, true),
        ("reward contract", reward, true),
        ("gradient check", gradient, true),
        ("closed-loop completion", closed_loop, true),
        ("directional efficiency", directional_efficiency, false),
        ("training smoke", training, true),
        ("determinism", determinism, true),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, asserted)) in criteria.iter().enumerate() {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && !asserted {
            " [known, not asserted]"
        } else {
            ""
        };
        println!("{tag} {:>2} {name}: {}{note}", i + 1, o.detail);
        if !o.pass && *asserted {
            failed.push(*name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed: {failed:?}");
        std::process::exit(1);
    }
}
