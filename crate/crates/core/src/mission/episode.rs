use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::sync::Arc;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{LocalPolicy, Method, MissionConfig, ReasonerBackend};
use super::log::{EpisodeLog, EpisodeSummary, LogEntry, PlanRecord, StepRecord};
use super::MissionError;
use crate::community::{
    build_global_graph, detect_communities, prune_topk, GlobalBeliefGraph, Topology,
};
use crate::fast::{
    build_informative_graph, deviation, guidepost_heuristic, instruction_reward, policy_forward,
    reward_from_parts, select_waypoint, GuidanceContext, InformativeGraph, PolicyParams,
    RewardConfig,
};
use crate::geometry::Point;
use crate::graph::{
    build_graph, extract_local, nearest_visible_frontier, sample_viewpoints, CollisionFreeGraph,
    NodeId, ShortestPaths, UtilityCache,
};
use crate::gridworld::{
    detect_frontiers, path_length, scan_footprint, sense_and_update, CoverageTracker, FrontierSet,
    GroundTruthMap, OccupancyBelief,
};
use crate::slow::{
    characterize, derive_strategy, plan_global_path, update_memory, EpisodeMemory,
    ExplorationStrategy, GlobalPath, MemoryEvent, MemoryEventKind, PlanOutcome, PlanningContext,
    Reasoner, ReplayTransport,
};

/// How many recent poses feed the trail feature.
const TRAIL_LEN: usize = 32;

/// Who picks the next waypoint.
#[derive(Clone, Debug)]
pub enum Controller {
    Heuristic,
    Network(Arc<PolicyParams>, crate::fast::SelectionMode),
    Greedy,
}

impl Controller {
    pub fn from_config(cfg: &MissionConfig) -> Result<Self, MissionError> {
        Ok(match (cfg.method, cfg.policy) {
            (Method::Greedy, _) => Controller::Greedy,
            (Method::Guided, LocalPolicy::Heuristic) => Controller::Heuristic,
            (Method::Guided, LocalPolicy::Network) => {
                let path = cfg.checkpoint.as_ref().ok_or_else(|| {
                    MissionError::Config("network policy needs a checkpoint".into())
                })?;
                let text = std::fs::read_to_string(path)
                    .map_err(|e| MissionError::Config(format!("{path}: {e}")))?;
                Controller::Network(
                    Arc::new(PolicyParams::from_checkpoint(&text)?),
                    cfg.selection,
                )
            }
        })
    }

    fn method(&self) -> Method {
        match self {
            Controller::Greedy => Method::Greedy,
            _ => Method::Guided,
        }
    }
}

pub fn reasoner_from_config(cfg: &MissionConfig) -> Result<Reasoner, MissionError> {
    match cfg.reasoner {
        ReasonerBackend::Rule => Ok(Reasoner::Rule),
        ReasonerBackend::External => {
            if let Some(path) = &cfg.replay {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| MissionError::Config(format!("{path}: {e}")))?;
                let replay = ReplayTransport::from_jsonl(&text)
                    .map_err(|e| MissionError::Config(e.to_string()))?;
                return Ok(Reasoner::External(Box::new(replay)));
            }
            #[cfg(feature = "http")]
            if let Some(endpoint) = &cfg.endpoint {
                return Ok(Reasoner::External(Box::new(
                    crate::slow::HttpTransport::new(
                        endpoint.clone(),
                        crate::slow::HttpTransport::DEFAULT_TIMEOUT,
                    ),
                )));
            }
            Err(MissionError::Config(
                "external reasoner needs an endpoint or a replay file".into(),
            ))
        }
    }
}

/// Guidance currently being followed.
#[derive(Clone, Debug)]
struct Guidance {
    path: GlobalPath,
    /// Index of the furthest route node reached.
    progress: usize,
    issued: usize,
}

/// What the local decision sees.
#[derive(Clone, Debug)]
pub struct Observation {
    pub graph: InformativeGraph,
    /// Guided waypoint `w_t*`.
    pub guided: Option<(NodeId, Point)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StepOutcome {
    Moved(StepRecord),
    Finished,
}

/// Closed-loop exploration episode, advanced one decision at a time.
pub struct Episode {
    cfg: MissionConfig,
    controller: Controller,
    truth: GroundTruthMap,
    belief: OccupancyBelief,
    coverage: CoverageTracker,
    frontiers: FrontierSet,
    utility: UtilityCache,
    graph: CollisionFreeGraph,
    pose: Point,
    node: NodeId,
    visited: BTreeSet<NodeId>,
    trail: Vec<Point>,
    poses: Vec<Point>,
    strategy: ExplorationStrategy,
    reasoner: Reasoner,
    memory: EpisodeMemory,
    next_event: u64,
    guidance: Option<Guidance>,
    communities: usize,
    retained: usize,
    utility_max: f64,
    reward_cfg: RewardConfig,
    rng: ChaCha8Rng,
    step: usize,
    revisits: usize,
    plans: usize,
    complete: bool,
    finished: bool,
    aborted: Option<String>,
    log: EpisodeLog,
    sink: Option<Box<dyn Write + Send>>,
}

impl Episode {
    pub fn new(cfg: MissionConfig, truth: GroundTruthMap) -> Result<Self, MissionError> {
        let controller = Controller::from_config(&cfg)?;
        let reasoner = reasoner_from_config(&cfg)?;
        Self::with_parts(cfg, truth, controller, reasoner)
    }

    pub fn with_parts(
        cfg: MissionConfig,
        truth: GroundTruthMap,
        controller: Controller,
        mut reasoner: Reasoner,
    ) -> Result<Self, MissionError> {
        cfg.validate()?;
        let description = cfg.environment_description(truth.kind());
        let characterized = characterize(&description, &mut reasoner)?;
        let strategy = derive_strategy(&characterized.value, &description);
        let pose = truth.start_pose();
        let mut belief = OccupancyBelief::unknown_like(&truth);
        let scan = sense_and_update(&mut belief, &truth, pose, cfg.sensor())?;
        let footprint = scan_footprint(cfg.sensor_range, truth.resolution()) as f64;
        let coverage = CoverageTracker::new(&truth);
        let mut ep = Self {
            controller,
            coverage,
            frontiers: FrontierSet::default(),
            utility: UtilityCache::new(),
            graph: CollisionFreeGraph::from_parts(
                Vec::new(),
                Vec::new(),
                cfg.k,
                cfg.node_resolution,
            )?,
            pose,
            node: 0,
            visited: BTreeSet::new(),
            trail: vec![pose],
            poses: vec![pose],
            strategy,
            reasoner,
            memory: EpisodeMemory::new(),
            next_event: 0,
            guidance: None,
            communities: 0,
            retained: 0,
            utility_max: 1.0,
            reward_cfg: RewardConfig::new(footprint),
            rng: ChaCha8Rng::seed_from_u64(cfg.rng_seed),
            step: 0,
            revisits: 0,
            plans: 0,
            complete: false,
            finished: false,
            aborted: None,
            log: EpisodeLog::default(),
            sink: None,
            belief,
            truth,
            cfg,
        };
        ep.refresh(&scan.revealed)?;
        ep.node = ep
            .graph
            .nearest_node(pose)
            .ok_or_else(|| MissionError::Deadlock("no viewpoint at the start pose".into()))?
            .id;
        ep.visited.insert(ep.node);
        ep.event(MemoryEventKind::EnteredCommunity(ep.node));
        ep.complete = ep.is_complete();
        let start = LogEntry::Start {
            pose,
            node: ep.node,
            coverage: ep.coverage.fraction(&ep.belief),
            characterization_fallback: characterized.fallback,
        };
        ep.push(start);
        Ok(ep)
    }

    /// Streams every log line to `sink` as it is produced.
    pub fn set_sink(&mut self, mut sink: Box<dyn Write + Send>) {
        for e in &self.log.entries {
            let _ = writeln!(
                sink,
                "{}",
                serde_json::to_string(e).expect("log entries serialize")
            );
        }
        let _ = sink.flush();
        self.sink = Some(sink);
    }

    fn push(&mut self, entry: LogEntry) {
        if let Some(sink) = &mut self.sink {
            let _ = writeln!(
                sink,
                "{}",
                serde_json::to_string(&entry).expect("log entries serialize")
            );
            let _ = sink.flush();
        }
        self.log.entries.push(entry);
    }

    fn event(&mut self, kind: MemoryEventKind) {
        let e = MemoryEvent {
            id: self.next_event,
            kind,
        };
        self.next_event += 1;
        self.memory = update_memory(std::mem::take(&mut self.memory), &e);
    }

    fn is_complete(&self) -> bool {
        self.frontiers.is_empty() && self.coverage.known(&self.belief) == self.coverage.total()
    }

    /// Rebuilds frontiers, viewpoints, utilities and the graph from the belief.
    fn refresh(&mut self, revealed: &[(usize, usize)]) -> Result<(), MissionError> {
        self.frontiers = detect_frontiers(&self.belief);
        let mut viewpoints = sample_viewpoints(&self.belief, self.cfg.node_resolution)?;
        let nodes: Vec<(NodeId, Point)> = viewpoints.iter().map(|v| (v.id, v.position)).collect();
        self.utility.refresh(
            &nodes,
            revealed,
            &self.frontiers,
            &self.belief,
            self.cfg.utility_range(),
        );
        for v in &mut viewpoints {
            v.utility = self.utility.get(v.id).unwrap_or(0);
            self.utility_max = self.utility_max.max(v.utility as f64);
        }
        self.graph = build_graph(
            &viewpoints,
            self.cfg.k,
            &self.belief,
            self.cfg.node_resolution,
        )?;
        Ok(())
    }

    pub fn config(&self) -> &MissionConfig {
        &self.cfg
    }

    pub fn truth(&self) -> &GroundTruthMap {
        &self.truth
    }

    pub fn belief(&self) -> &OccupancyBelief {
        &self.belief
    }

    pub fn graph(&self) -> &CollisionFreeGraph {
        &self.graph
    }

    pub fn pose(&self) -> Point {
        self.pose
    }

    pub fn node(&self) -> NodeId {
        self.node
    }

    pub fn strategy(&self) -> &ExplorationStrategy {
        &self.strategy
    }

    pub fn memory(&self) -> &EpisodeMemory {
        &self.memory
    }

    pub fn log(&self) -> &EpisodeLog {
        &self.log
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn complete(&self) -> bool {
        self.complete
    }

    pub fn finished(&self) -> bool {
        self.finished || self.complete || self.step >= self.cfg.step_cap
    }

    pub fn global_path(&self) -> Option<&GlobalPath> {
        self.guidance.as_ref().map(|g| &g.path)
    }

    fn replan_trigger(&self) -> Option<&'static str> {
        let Some(g) = &self.guidance else {
            return Some("no_guidance");
        };
        let terminal = g.path.terminal;
        if self.node == terminal {
            return Some("arrived");
        }
        if self.graph.node(terminal).is_none_or(|v| v.utility == 0) {
            return Some("target_exhausted");
        }
        match g.path.route.get(g.progress + 1) {
            Some(next) if self.graph.has_edge(self.node, *next) => {}
            _ => return Some("route_broken"),
        }
        if self.step >= g.issued + self.cfg.replan_interval {
            return Some("scheduled");
        }
        None
    }

    /// Builds the global graph for the current belief graph.
    pub fn global_graph(&self) -> Result<(GlobalBeliefGraph, usize), MissionError> {
        let topology = Topology::from_graph(&self.graph);
        let partition = detect_communities(&topology);
        let retained = prune_topk(&self.graph, &partition, self.cfg.k_top, &[self.node])?;
        Ok((
            build_global_graph(&self.graph, &partition, &retained)?,
            partition.community_count(),
        ))
    }

    /// Distance from every positive-utility node to the closest frontier it sees.
    pub fn frontier_distances(&self) -> BTreeMap<NodeId, f64> {
        let range = self.cfg.utility_range();
        self.graph
            .nodes()
            .iter()
            .filter(|v| v.utility > 0)
            .filter_map(|v| {
                nearest_visible_frontier(v.position, &self.frontiers, &self.belief, range)
                    .map(|d| (v.id, d))
            })
            .collect()
    }

    fn replan(&mut self, trigger: &str) -> Result<bool, MissionError> {
        let (global, count) = self.global_graph()?;
        let frontier_distance = self.frontier_distances();
        self.communities = count;
        self.retained = global.nodes.len();
        let width = self.truth.width() as f64 * self.truth.resolution();
        let height = self.truth.height() as f64 * self.truth.resolution();
        let ctx = PlanningContext {
            graph: &self.graph,
            global: &global,
            current_node: self.node,
            strategy: &self.strategy,
            memory: &self.memory,
            extent: (width, height),
            frontier_distance: &frontier_distance,
        };
        let reasoned = plan_global_path(&ctx, &mut self.reasoner)?;
        let PlanOutcome::Path(path) = reasoned.value else {
            self.guidance = None;
            return Ok(false);
        };
        self.plans += 1;
        self.event(MemoryEventKind::PathIssued(path.waypoints.clone()));
        self.push(LogEntry::Plan(PlanRecord {
            step: self.step,
            trigger: trigger.to_string(),
            communities: path.communities.clone(),
            waypoints: path.waypoints.clone(),
            terminal: path.terminal,
            target: self
                .graph
                .node(path.terminal)
                .map_or(self.pose, |v| v.position),
            route: path.route.clone(),
            rationale: path.rationale.clone(),
            fallback: reasoned.fallback,
        }));
        self.guidance = Some(Guidance {
            path,
            progress: 0,
            issued: self.step,
        });
        Ok(true)
    }

    fn guided_waypoint(&self) -> Option<(NodeId, Point)> {
        let g = self.guidance.as_ref()?;
        let id = *g.path.route.get(g.progress + 1)?;
        self.graph.node(id).map(|v| (id, v.position))
    }

    /// Informative graph and guided waypoint for the next decision, or `None`
    /// once the episode is over. Runs the global replan when one is due.
    pub fn observe(&mut self) -> Result<Option<Observation>, MissionError> {
        if self.finished() {
            self.finish();
            return Ok(None);
        }
        if self.controller.method() == Method::Guided {
            if let Some(trigger) = self.replan_trigger() {
                if !self.replan(trigger)? {
                    return Err(MissionError::Deadlock(
                        "planner reports nothing left to explore but the map is incomplete".into(),
                    ));
                }
            }
        }
        let guided = self.guided_waypoint();
        let route_points: Vec<Point> = match &self.guidance {
            Some(g) if self.controller.method() == Method::Guided => g.path.route[g.progress..]
                .iter()
                .filter_map(|id| self.graph.node(*id).map(|v| v.position))
                .collect(),
            _ => Vec::new(),
        };
        let local = extract_local(&self.graph, self.pose, self.cfg.window_size())?;
        let ctx = GuidanceContext {
            global_path: route_points,
            next_waypoint: guided.map(|g| g.1),
            trail: self.trail.clone(),
            node_resolution: self.cfg.node_resolution,
        };
        let graph = build_informative_graph(&local, self.pose, &ctx, self.utility_max)?;
        Ok(Some(Observation { graph, guided }))
    }

    /// Greedy baseline choice: the neighbor on a shortest route to the
    /// nearest frontier, reached through an unvisited positive-utility node.
    pub fn greedy_choice(&self) -> Option<NodeId> {
        // Seeds carry the distance to the closest frontier each node sees, so
        // the robot closes in on frontier cells rather than on any node that
        // merely sees one.
        let seeds: Vec<(usize, f64)> = self
            .frontier_distances()
            .into_iter()
            .filter(|&(id, _)| !self.visited.contains(&id))
            .filter_map(|(id, d)| Some((self.graph.index_of(id)?, d)))
            .collect();
        if seeds.is_empty() {
            return None;
        }
        let paths = ShortestPaths::from_seeds(&self.graph, &seeds);
        let here = self.graph.index_of(self.node)?;
        let p = self.graph.node_at(here).position;
        self.graph
            .neighbors_of_index(here)
            .iter()
            .map(|&nb| {
                (
                    nb,
                    paths.dist[nb] + p.distance(&self.graph.node_at(nb).position),
                )
            })
            .filter(|(_, d)| d.is_finite())
            .min_by(|a, b| {
                a.1.total_cmp(&b.1)
                    .then(self.graph.node_at(a.0).id.cmp(&self.graph.node_at(b.0).id))
            })
            .map(|(nb, _)| self.graph.node_at(nb).id)
    }

    /// Controller decision for an observation.
    pub fn decide(&mut self, obs: &Observation) -> Result<NodeId, MissionError> {
        let pick = match &self.controller {
            Controller::Greedy => {
                return self.greedy_choice().ok_or_else(|| {
                    MissionError::Deadlock("no reachable node with positive utility".into())
                })
            }
            Controller::Heuristic => guidepost_heuristic(&obs.graph, obs.guided.map(|g| g.1)),
            Controller::Network(params, mode) => {
                let dist = policy_forward(&obs.graph, params)?;
                Some(dist.candidates[select_waypoint(&dist, *mode, &mut self.rng)])
            }
        };
        pick.map(|i| obs.graph.ids[i])
            .ok_or_else(|| MissionError::Deadlock("current node has no neighbor".into()))
    }

    /// Moves to `target`, senses and updates everything downstream.
    pub fn execute(
        &mut self,
        target: NodeId,
        guided: Option<(NodeId, Point)>,
    ) -> Result<StepRecord, MissionError> {
        if !self.graph.has_edge(self.node, target) {
            return Err(MissionError::InvalidMove {
                from: self.node,
                to: target,
            });
        }
        let from = self.node;
        let next = self
            .graph
            .node(target)
            .expect("edge endpoints exist")
            .position;
        self.pose = next;
        self.node = target;
        self.step += 1;
        let revisit = !self.visited.insert(target);
        if revisit {
            self.revisits += 1;
        }
        self.poses.push(next);
        self.trail.push(next);
        if self.trail.len() > TRAIL_LEN {
            self.trail.remove(0);
        }
        self.event(MemoryEventKind::StepTick);
        self.event(MemoryEventKind::EnteredCommunity(target));

        let scan = sense_and_update(&mut self.belief, &self.truth, next, self.cfg.sensor())?;
        self.refresh(&scan.revealed)?;
        self.complete = self.is_complete();
        if self.graph.degree(target) <= 1 && self.graph.node(target).is_some_and(|v| v.utility == 0)
        {
            self.event(MemoryEventKind::DeadEndDetected(target));
        }
        if let Some(g) = &mut self.guidance {
            let tol = self.cfg.node_resolution / 2.0;
            if let Some(i) = g.path.route[g.progress..].iter().rposition(|id| {
                *id == target
                    || self
                        .graph
                        .node(*id)
                        .is_some_and(|v| v.position.distance(&next) < tol)
            }) {
                g.progress += i;
            }
        }

        let (dev, r_dev) = match guided {
            Some((_, w_star)) => {
                let d = deviation(next, w_star, self.cfg.node_resolution)?;
                (Some(d), Some(instruction_reward(d.clamped)?))
            }
            None => (None, None),
        };
        let reward = reward_from_parts(
            scan.revealed.len(),
            dev.map_or(0.0, |d| d.clamped),
            self.complete,
            &self.reward_cfg,
        )?;
        let record = StepRecord {
            step: self.step,
            pose: next,
            from,
            waypoint: target,
            guided: guided.map(|g| g.1),
            deviation: dev.map(|d| d.raw),
            r_dev,
            reward,
            revealed: scan.revealed.len(),
            communities: self.communities,
            retained: self.retained,
            coverage: self.coverage.fraction(&self.belief),
            revisit,
        };
        self.push(LogEntry::Step(record.clone()));
        Ok(record)
    }

    /// One full decision step with the configured controller.
    pub fn step(&mut self) -> Result<StepOutcome, MissionError> {
        let Some(obs) = self.observe()? else {
            return Ok(StepOutcome::Finished);
        };
        let target = self.decide(&obs)?;
        let guided = if self.controller.method() == Method::Guided {
            obs.guided
        } else {
            None
        };
        self.execute(target, guided).map(StepOutcome::Moved)
    }

    fn finish(&mut self) {
        if self.finished {
            return;
        }
        self.finished = true;
        let summary = EpisodeSummary {
            method: self.controller.method().as_str().to_string(),
            map_kind: self.truth.kind().as_str().to_string(),
            map_seed: self.truth.seed(),
            distance: path_length(&self.poses),
            steps: self.step,
            coverage: self.coverage.fraction(&self.belief),
            complete: self.complete,
            revisits: self.revisits,
            plans: self.plans,
            aborted: self.aborted.clone(),
        };
        self.push(LogEntry::Summary(summary));
    }

    /// Steps until completion, the step cap, or an error. Errors are written
    /// to the log summary before being returned.
    pub fn run(&mut self) -> Result<(), MissionError> {
        loop {
            match self.step() {
                Ok(StepOutcome::Finished) => return Ok(()),
                Ok(StepOutcome::Moved(_)) => {}
                Err(e) => {
                    self.aborted = Some(e.to_string());
                    self.finish();
                    return Err(e);
                }
            }
        }
    }

    pub fn into_log(mut self) -> EpisodeLog {
        self.finish();
        self.log
    }
}

/// Runs a full episode. Aborted episodes still return their log, with the
/// reason in the summary.
pub fn run_episode(cfg: &MissionConfig) -> Result<EpisodeLog, MissionError> {
    let truth = cfg.map.load()?;
    let mut ep = Episode::new(cfg.clone(), truth)?;
    let _ = ep.run();
    Ok(ep.into_log())
}

pub fn run_baseline_greedy(cfg: &MissionConfig) -> Result<EpisodeLog, MissionError> {
    let mut cfg = cfg.clone();
    cfg.method = Method::Greedy;
    run_episode(&cfg)
}
