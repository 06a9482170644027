//! Browser bindings: map preview, full episode replay and community view.
//!
//! Every export returns a string (SVG or JSON) so the page stays plain
//! JavaScript. The `*_impl` functions carry the logic and are tested natively.

use explore_core::community::{detect_communities, modularity, Topology};
use explore_core::gridworld::{generate_map, GroundTruthMap, MapKind, OccupancyBelief};
use explore_core::mission::{
    community_color, render_belief, render_trajectory, Episode, MapSpec, Method, MissionConfig,
    StepOutcome,
};
use explore_core::Point;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const RESOLUTION: f64 = 0.4;
/// Keeps the page responsive even if an episode stalls.
const STEP_CAP: usize = 1500;

fn config(kind: &str, seed: u32, size: u32, method: &str) -> Result<MissionConfig, String> {
    let kind: MapKind = kind.parse().map_err(|e| format!("{e}"))?;
    let method = match method {
        "guided" => Method::Guided,
        "greedy" => Method::Greedy,
        other => return Err(format!("unknown method `{other}`")),
    };
    if !(16..=128).contains(&size) {
        return Err(format!("map size {size} outside 16..=128"));
    }
    Ok(MissionConfig {
        map: MapSpec {
            kind,
            seed: u64::from(seed),
            width: size as usize,
            height: size as usize,
            resolution: RESOLUTION,
            file: None,
        },
        method,
        step_cap: STEP_CAP,
        rng_seed: u64::from(seed),
        ..MissionConfig::default()
    })
}

fn truth(cfg: &MissionConfig) -> Result<GroundTruthMap, String> {
    generate_map(
        cfg.map.kind,
        cfg.map.seed,
        cfg.map.width,
        cfg.map.height,
        cfg.map.resolution,
    )
    .map_err(|e| e.to_string())
}

pub fn map_svg_impl(kind: &str, seed: u32, size: u32) -> Result<String, String> {
    let cfg = config(kind, seed, size, "guided")?;
    let map = truth(&cfg)?;
    let start = vec![(map.start_pose(), "#d62728".to_string())];
    Ok(render_belief(
        &OccupancyBelief::fully_known(&map),
        &start,
        &[],
    ))
}

#[derive(Serialize)]
struct EpisodeView {
    svg: String,
    distance: f64,
    steps: usize,
    coverage: f64,
    complete: bool,
    plans: usize,
    aborted: Option<String>,
}

pub fn run_episode_impl(kind: &str, seed: u32, size: u32, method: &str) -> Result<String, String> {
    let cfg = config(kind, seed, size, method)?;
    let map = truth(&cfg)?;
    let mut ep = Episode::new(cfg, map.clone()).map_err(|e| e.to_string())?;
    // Aborts are reported in the summary rather than as an error.
    let _ = ep.run();
    let log = ep.into_log();
    let summary = log
        .summary()
        .cloned()
        .ok_or("episode produced no summary")?;
    let view = EpisodeView {
        svg: render_trajectory(&log, &map),
        distance: summary.distance,
        steps: summary.steps,
        coverage: summary.coverage,
        complete: summary.complete,
        plans: summary.plans,
        aborted: summary.aborted,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CommunityView {
    svg: String,
    steps: usize,
    viewpoints: usize,
    communities: usize,
    retained: usize,
    modularity: f64,
}

/// Advances a guided episode `steps` decisions and colors every viewpoint by
/// its community. Pruned communities are drawn grey; global edges join
/// community centroids.
pub fn community_view_impl(kind: &str, seed: u32, size: u32, steps: u32) -> Result<String, String> {
    let cfg = config(kind, seed, size, "guided")?;
    let map = truth(&cfg)?;
    let mut ep = Episode::new(cfg, map).map_err(|e| e.to_string())?;
    for _ in 0..steps {
        match ep.step() {
            Ok(StepOutcome::Moved(_)) => {}
            Ok(StepOutcome::Finished) | Err(_) => break,
        }
    }
    let graph = ep.graph();
    let topology = Topology::from_graph(graph);
    let partition = detect_communities(&topology);
    let q = modularity(&topology, &partition).map_err(|e| e.to_string())?;
    let (global, count) = ep.global_graph().map_err(|e| e.to_string())?;

    let mut nodes: Vec<(Point, String)> = graph
        .nodes()
        .iter()
        .map(|v| {
            let color = global
                .community_of_member(v.id)
                .map_or_else(|| "#b0b0b0".to_string(), community_color);
            (v.position, color)
        })
        .collect();
    nodes.push((ep.pose(), "#000000".to_string()));
    let centroid = |c| {
        global
            .nodes
            .iter()
            .find(|n| n.community == c)
            .map(|n| n.centroid)
    };
    let edges: Vec<(Point, Point)> = global
        .edges
        .iter()
        .filter_map(|e| Some((centroid(e.a)?, centroid(e.b)?)))
        .collect();
    let view = CommunityView {
        svg: render_belief(ep.belief(), &nodes, &edges),
        steps: ep.steps_taken(),
        viewpoints: graph.len(),
        communities: count,
        retained: global.nodes.len(),
        modularity: q,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

/// Ground-truth map as SVG, start pose in red.
#[wasm_bindgen]
pub fn map_svg(kind: &str, seed: u32, size: u32) -> Result<String, JsValue> {
    map_svg_impl(kind, seed, size).map_err(|e| JsValue::from_str(&e))
}

/// Runs a full episode; JSON with `svg` and summary metrics.
#[wasm_bindgen]
pub fn run_episode(kind: &str, seed: u32, size: u32, method: &str) -> Result<String, JsValue> {
    run_episode_impl(kind, seed, size, method).map_err(|e| JsValue::from_str(&e))
}

/// Community snapshot after `steps` decisions; JSON with `svg` and counts.
#[wasm_bindgen]
pub fn community_view(kind: &str, seed: u32, size: u32, steps: u32) -> Result<String, JsValue> {
    community_view_impl(kind, seed, size, steps).map_err(|e| JsValue::from_str(&e))
}
