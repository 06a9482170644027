use std::io::Write;
use std::sync::{Arc, Mutex};

use explore_core::gridworld::io::write_map;
use explore_core::gridworld::{generate_map, GroundTruthMap, MapKind};
use explore_core::mission::{
    benchmark, config_label, render_trajectory, run_baseline_greedy, run_episode, Episode,
    EpisodeLog, LocalPolicy, LogEntry, MapSpec, Method, MissionConfig, MissionError, StepOutcome,
};

fn small(kind: MapKind, seed: u64) -> MissionConfig {
    MissionConfig {
        map: MapSpec {
            kind,
            seed,
            width: 32,
            height: 32,
            ..MapSpec::default()
        },
        rng_seed: seed,
        ..MissionConfig::default()
    }
}

#[test]
fn logs_are_byte_identical_across_runs() {
    for kind in [MapKind::Indoor, MapKind::Warehouse] {
        for method in [Method::Guided, Method::Greedy] {
            let cfg = MissionConfig {
                method,
                ..small(kind, 3)
            };
            let a = run_episode(&cfg).unwrap().to_jsonl();
            let b = run_episode(&cfg).unwrap().to_jsonl();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn bench_is_identical_across_thread_counts() {
    let configs = [small(MapKind::Forest, 1), small(MapKind::Indoor, 2)];
    let methods = [Method::Guided, Method::Greedy];
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| benchmark(&configs, &methods, 2).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one.to_csv(), four.to_csv());
    assert_eq!(one.episodes, four.episodes);
}

#[test]
fn small_maps_complete() {
    for kind in [MapKind::Indoor, MapKind::Forest, MapKind::Warehouse] {
        for seed in 0..3 {
            let cfg = small(kind, seed);
            for log in [
                run_episode(&cfg).unwrap(),
                run_baseline_greedy(&cfg).unwrap(),
            ] {
                let s = log.summary().unwrap();
                assert!(s.complete, "{kind} seed {seed} {}: {s:?}", s.method);
                assert_eq!(s.aborted, None);
                assert_eq!(s.coverage, 1.0);
            }
        }
    }
}

#[test]
fn step_cap_stops_the_episode() {
    let cfg = MissionConfig {
        step_cap: 1,
        ..small(MapKind::Indoor, 0)
    };
    let log = run_episode(&cfg).unwrap();
    assert_eq!(log.steps().count(), 1);
    let s = log.summary().unwrap();
    assert_eq!(s.steps, 1);
    assert!(!s.complete);
    assert_eq!(log.poses().len(), 2);
}

#[test]
fn sealed_room_finishes_without_moving() {
    let rows = ["#######", "#.....#", "#..S..#", "#.....#", "#######"];
    let truth = GroundTruthMap::from_ascii(&rows, 0.4).unwrap();
    let mut ep = Episode::new(MissionConfig::default(), truth).unwrap();
    assert!(ep.complete());
    assert_eq!(ep.step().unwrap(), StepOutcome::Finished);
    let log = ep.into_log();
    let s = log.summary().unwrap();
    assert_eq!((s.steps, s.distance, s.plans), (0, 0.0, 0));
    assert!(s.complete);
}

#[test]
fn every_move_follows_a_graph_edge() {
    for method in [Method::Guided, Method::Greedy] {
        let cfg = MissionConfig {
            method,
            ..small(MapKind::Warehouse, 5)
        };
        let truth = cfg.map.load().unwrap();
        let mut ep = Episode::new(cfg, truth).unwrap();
        let mut moves = 0;
        while let Some(obs) = ep.observe().unwrap() {
            let from = ep.node();
            let to = ep.decide(&obs).unwrap();
            assert!(ep.graph().has_edge(from, to), "{from} -> {to}");
            let guided = (method == Method::Guided).then_some(obs.guided).flatten();
            let rec = ep.execute(to, guided).unwrap();
            assert_eq!((rec.from, rec.waypoint), (from, to));
            assert_eq!(ep.node(), to);
            moves += 1;
        }
        assert!(ep.complete() && moves > 0);
    }
}

#[test]
fn non_edge_moves_are_rejected() {
    let cfg = small(MapKind::Indoor, 0);
    let truth = cfg.map.load().unwrap();
    let mut ep = Episode::new(cfg, truth).unwrap();
    let here = ep.node();
    let far = ep
        .graph()
        .nodes()
        .iter()
        .map(|v| v.id)
        .find(|&id| id != here && !ep.graph().has_edge(here, id));
    if let Some(far) = far {
        assert!(matches!(
            ep.execute(far, None),
            Err(MissionError::InvalidMove { .. })
        ));
        assert_eq!(ep.node(), here);
        assert_eq!(ep.steps_taken(), 0);
    }
}

#[test]
fn step_records_are_consistent() {
    let log = run_episode(&small(MapKind::Forest, 2)).unwrap();
    let steps: Vec<_> = log.steps().collect();
    let poses = log.poses();
    assert_eq!(poses.len(), steps.len() + 1);
    let mut last_cov = 0.0;
    for (i, s) in steps.iter().enumerate() {
        assert_eq!(s.step, i + 1);
        assert_eq!(s.pose, poses[i + 1]);
        assert!(s.coverage >= last_cov);
        last_cov = s.coverage;
        if let (Some(d), Some(r)) = (s.deviation, s.r_dev) {
            assert!(d >= 0.0 && (-1.0..=0.0).contains(&r));
        }
        if i > 0 {
            assert_eq!(s.from, steps[i - 1].waypoint);
        }
    }
    let distance: f64 = poses.windows(2).map(|w| w[0].distance(&w[1])).sum();
    assert!((log.summary().unwrap().distance - distance).abs() < 1e-9);
    assert!(log.plans().count() >= 1);
}

#[test]
fn greedy_logs_carry_no_guidance() {
    let log = run_baseline_greedy(&small(MapKind::Indoor, 1)).unwrap();
    assert_eq!(log.plans().count(), 0);
    assert!(log.steps().all(|s| s.guided.is_none() && s.r_dev.is_none()));
    assert_eq!(log.summary().unwrap().method, "greedy");
}

#[test]
fn log_roundtrips_through_jsonl() {
    let log = run_episode(&small(MapKind::Indoor, 4)).unwrap();
    let text = log.to_jsonl();
    let back = EpisodeLog::from_jsonl(&text).unwrap();
    assert_eq!(back, log);
    assert_eq!(back.to_jsonl(), text);
    assert!(matches!(back.entries.first(), Some(LogEntry::Start { .. })));
    assert!(matches!(back.entries.last(), Some(LogEntry::Summary(_))));

    // A torn last line from a crash is dropped; a torn middle line is not.
    let torn = format!("{}{{\"type\":\"st", text);
    assert_eq!(EpisodeLog::from_jsonl(&torn).unwrap(), log);
    let lines: Vec<&str> = text.lines().collect();
    let broken = format!("{}\nnot json\n{}\n", lines[0], lines[1]);
    assert!(EpisodeLog::from_jsonl(&broken).is_err());
}

#[derive(Clone, Default)]
struct Shared(Arc<Mutex<Vec<u8>>>);

impl Write for Shared {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0.lock().unwrap().extend_from_slice(buf);
        Ok(buf.len())
    }
    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

#[test]
fn sink_streams_the_same_log() {
    let cfg = small(MapKind::Warehouse, 2);
    let truth = cfg.map.load().unwrap();
    let mut ep = Episode::new(cfg, truth).unwrap();
    let buf = Shared::default();
    ep.step().unwrap();
    ep.set_sink(Box::new(buf.clone()));
    ep.run().unwrap();
    let log = ep.into_log();
    let streamed = String::from_utf8(buf.0.lock().unwrap().clone()).unwrap();
    assert_eq!(streamed, log.to_jsonl());
}

#[test]
fn trajectory_svg_has_one_vertex_per_pose() {
    let cfg = small(MapKind::Forest, 0);
    let log = run_episode(&cfg).unwrap();
    let svg = render_trajectory(&log, &cfg.map.load().unwrap());
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    let line = svg
        .lines()
        .find(|l| l.contains("class=\"trajectory\""))
        .unwrap();
    let points = line
        .split("points=\"")
        .nth(1)
        .unwrap()
        .split('"')
        .next()
        .unwrap();
    assert_eq!(points.split(' ').count(), log.poses().len());
    assert_eq!(svg.matches("<polygon").count(), log.plans().count());
    assert_eq!(svg.matches("<line ").count(), log.poses().len() - 1);
}

#[test]
fn bench_pairs_seeds_and_summarizes() {
    let configs = [small(MapKind::Indoor, 10)];
    let report = benchmark(&configs, &[Method::Greedy, Method::Guided], 3).unwrap();
    assert_eq!(report.episodes.len(), 6);
    for m in [Method::Guided, Method::Greedy] {
        let seeds: Vec<u64> = report
            .episodes
            .iter()
            .filter(|e| e.method == m)
            .map(|e| e.seed)
            .collect();
        assert_eq!(seeds, vec![10, 11, 12]);
    }
    assert_eq!(report.rows.len(), 2);
    let csv = report.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "config,method,runs,distance_mean,distance_std,steps_mean,steps_std,completed"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with(&format!("{},greedy,3,", config_label(&configs[0]))));
    let greedy = &report.rows[0];
    let d: Vec<f64> = report
        .episodes
        .iter()
        .filter(|e| e.method == Method::Greedy)
        .map(|e| e.distance)
        .collect();
    let mean = d.iter().sum::<f64>() / 3.0;
    let std = (d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 2.0).sqrt();
    assert!((greedy.distance_mean - mean).abs() < 1e-9);
    assert!((greedy.distance_std - std).abs() < 1e-9);
    assert_eq!(report.to_table().lines().count(), 2);
}

#[test]
fn map_files_load_like_generated_maps() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.map");
    let truth = generate_map(MapKind::Warehouse, 6, 32, 32, 0.4).unwrap();
    std::fs::write(&path, write_map(&truth)).unwrap();
    let mut cfg = small(MapKind::Warehouse, 6);
    let generated = run_episode(&cfg).unwrap();
    cfg.map.file = Some(path.to_string_lossy().into_owned());
    assert_eq!(cfg.map.load().unwrap(), truth);
    assert_eq!(run_episode(&cfg).unwrap(), generated);
    assert!(config_label(&cfg).starts_with("file:"));
}

#[test]
fn config_parses_and_validates() {
    let text = r#"
        node_resolution = 1.0
        k = 4
        method = "greedy"
        [map]
        kind = "forest"
        seed = 9
    "#;
    let cfg = MissionConfig::from_toml(text).unwrap();
    assert_eq!(cfg.map.kind, MapKind::Forest);
    assert_eq!((cfg.map.seed, cfg.k, cfg.method), (9, 4, Method::Greedy));
    assert_eq!(cfg.k_top, MissionConfig::default().k_top);
    cfg.validate().unwrap();

    assert!(MissionConfig::from_toml("bogus = 1").is_err());
    assert!(MissionConfig::from_toml("[map]\nkind = \"moon\"").is_err());

    let bad = [
        MissionConfig {
            k: 0,
            ..MissionConfig::default()
        },
        MissionConfig {
            sensor_range: -1.0,
            ..MissionConfig::default()
        },
        MissionConfig {
            node_resolution: f64::NAN,
            ..MissionConfig::default()
        },
        MissionConfig {
            step_cap: 0,
            ..MissionConfig::default()
        },
        MissionConfig {
            policy: LocalPolicy::Network,
            ..MissionConfig::default()
        },
    ];
    for cfg in bad {
        assert!(
            matches!(cfg.validate(), Err(MissionError::Config(_))),
            "{cfg:?}"
        );
    }
    let derived = MissionConfig {
        sensor_range: 5.0,
        ..MissionConfig::default()
    };
    assert_eq!(derived.utility_range(), 4.5);
    assert!((derived.window_size() - 9.6).abs() < 1e-12);
}

#[test]
fn missing_reasoner_endpoint_is_a_config_error() {
    let cfg = MissionConfig {
        reasoner: explore_core::mission::ReasonerBackend::External,
        ..small(MapKind::Indoor, 0)
    };
    let truth = cfg.map.load().unwrap();
    assert!(matches!(
        Episode::new(cfg, truth),
        Err(MissionError::Config(_))
    ));
}
