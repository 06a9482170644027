use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::memory::EpisodeMemory;
use super::schema::{CoverageStrategy, EnergyPolicy, ExplorationStrategy, RevisitPolicy};
use super::PlanError;
use crate::community::{CommunityId, GlobalBeliefGraph, GlobalNode};
use crate::graph::{CollisionFreeGraph, NodeId, ShortestPaths};

/// Tuning constants of the rule-based reasoner.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerWeights {
    /// Score per meter of geodesic distance.
    pub lambda_dist: f64,
    /// Score per recorded visit.
    pub lambda_revisit: f64,
    /// Added when the strategy is boundary-first and the centroid is near the map edge.
    pub boundary_bonus: f64,
    /// How close to the edge counts as near, in meters.
    pub boundary_margin: f64,
}

impl Default for PlannerWeights {
    fn default() -> Self {
        Self {
            lambda_dist: 0.5,
            lambda_revisit: 2.0,
            boundary_bonus: 3.0,
            boundary_margin: 3.6,
        }
    }
}

impl PlannerWeights {
    pub fn from_strategy(strategy: &ExplorationStrategy) -> Self {
        let mut w = Self {
            lambda_dist: match strategy.efficiency.energy_policy {
                EnergyPolicy::Aggressive => 0.25,
                EnergyPolicy::Balanced => 0.5,
                EnergyPolicy::Conservative => 1.0,
            },
            lambda_revisit: match strategy.efficiency.revisit_policy {
                RevisitPolicy::Allow => 0.5,
                RevisitPolicy::AllowWhenNeeded => 2.0,
                RevisitPolicy::Avoid => 4.0,
            },
            ..Self::default()
        };
        if strategy.spatial.coverage_strategy != CoverageStrategy::BoundaryFirst {
            w.boundary_bonus = 0.0;
        }
        w
    }
}

/// Everything the global reasoner sees at one replan tick.
#[derive(Clone, Copy, Debug)]
pub struct PlanningContext<'a> {
    pub graph: &'a CollisionFreeGraph,
    pub global: &'a GlobalBeliefGraph,
    /// Graph node the robot stands on.
    pub current_node: NodeId,
    pub strategy: &'a ExplorationStrategy,
    pub memory: &'a EpisodeMemory,
    /// Map extent in meters.
    pub extent: (f64, f64),
    /// Distance from a positive-utility viewpoint to the closest frontier it
    /// sees. Members missing here rank after those present.
    pub frontier_distance: &'a BTreeMap<NodeId, f64>,
}

impl PlanningContext<'_> {
    pub fn current_community(&self) -> Result<CommunityId, PlanError> {
        self.global
            .community_of_member(self.current_node)
            .ok_or(PlanError::CurrentNotRetained(self.current_node))
    }
}

/// Global guidance handed to the fast module.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalPath {
    /// Community sequence starting at the robot's community.
    pub communities: Vec<CommunityId>,
    /// `[v_cur, representatives of intermediate communities.., terminal]`.
    pub waypoints: Vec<NodeId>,
    pub target_community: CommunityId,
    /// Member of the target community closest to a frontier.
    pub terminal: NodeId,
    /// Shortest graph route from `v_cur` to `terminal`, both inclusive.
    pub route: Vec<NodeId>,
    pub rationale: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PlanOutcome {
    Path(GlobalPath),
    /// No unvisited viewpoint has positive utility.
    ExplorationComplete,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CandidateScore {
    pub community: CommunityId,
    pub terminal: NodeId,
    pub distance: f64,
    pub visits: u32,
    pub score: f64,
}

/// Member to aim for: smallest route length plus distance to the closest
/// frontier it sees, then highest utility, then smallest id. Standing next to
/// a frontier is what resolves it; a far viewpoint may keep seeing it
/// forever. Members without a frontier distance rank last.
///
/// Visited members are skipped. Sensing is deterministic, so a viewpoint
/// already stood on has revealed everything it ever will, and aiming for it
/// again only produces oscillation.
fn terminal_of(
    node: &GlobalNode,
    ctx: &PlanningContext,
    paths: &ShortestPaths,
) -> Option<(NodeId, f64)> {
    node.members
        .iter()
        .filter(|&&m| m != ctx.current_node && ctx.memory.visits_of(m) == 0)
        .filter_map(|&m| {
            let v = ctx.graph.node(m)?;
            let d = paths.distance_to(ctx.graph, m);
            let f = ctx
                .frontier_distance
                .get(&m)
                .copied()
                .unwrap_or(f64::INFINITY);
            (v.utility > 0 && d.is_finite()).then_some((m, d + f, v.utility, d))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1).then(b.2.cmp(&a.2)).then(a.0.cmp(&b.0)))
        .map(|(m, _, _, d)| (m, d))
}

fn near_boundary(node: &GlobalNode, extent: (f64, f64), margin: f64) -> bool {
    let c = node.centroid;
    let edge = c.x.min(c.y).min(extent.0 - c.x).min(extent.1 - c.y);
    edge <= margin
}

/// Scores every community that has a reachable positive-utility member.
pub fn score_candidates(
    ctx: &PlanningContext,
    weights: &PlannerWeights,
) -> Result<Vec<CandidateScore>, PlanError> {
    let paths = ShortestPaths::from_node(ctx.graph, ctx.current_node)
        .ok_or(PlanError::UnknownNode(ctx.current_node))?;
    let mut out = Vec::new();
    for node in &ctx.global.nodes {
        let Some((terminal, distance)) = terminal_of(node, ctx, &paths) else {
            continue;
        };
        let visits = ctx.memory.community_visits(node);
        let mut score = node.utility as f64
            - weights.lambda_dist * distance
            - weights.lambda_revisit * visits as f64;
        if weights.boundary_bonus > 0.0 && near_boundary(node, ctx.extent, weights.boundary_margin)
        {
            score += weights.boundary_bonus;
        }
        out.push(CandidateScore {
            community: node.community,
            terminal,
            distance,
            visits,
            score,
        });
    }
    Ok(out)
}

/// Rule-based global reasoner: best-scoring community, ties to the smaller id.
pub fn plan_rule(ctx: &PlanningContext) -> Result<PlanOutcome, PlanError> {
    plan_rule_with(ctx, &PlannerWeights::from_strategy(ctx.strategy))
}

pub fn plan_rule_with(
    ctx: &PlanningContext,
    weights: &PlannerWeights,
) -> Result<PlanOutcome, PlanError> {
    if ctx.global.nodes.is_empty() {
        return Err(PlanError::EmptyGlobalGraph);
    }
    let current = ctx.current_community()?;
    let candidates = score_candidates(ctx, weights)?;
    let best = candidates.iter().max_by(|a, b| {
        a.score
            .total_cmp(&b.score)
            .then(b.community.cmp(&a.community))
    });
    let Some(best) = best else {
        let pending =
            ctx.graph.nodes().iter().any(|v| {
                v.id != ctx.current_node && v.utility > 0 && ctx.memory.visits_of(v.id) == 0
            });
        return if pending {
            Err(PlanError::Deadlock)
        } else {
            Ok(PlanOutcome::ExplorationComplete)
        };
    };
    let communities = ctx
        .global
        .shortest_path(current, best.community)
        .unwrap_or_else(|| vec![current, best.community]);
    let rationale = format!(
        "community {} scored {:.3} (distance {:.2} m, {} visits)",
        best.community, best.score, best.distance, best.visits
    );
    ground_path(ctx, communities, best.terminal, rationale).map(PlanOutcome::Path)
}

/// Turns a community sequence into viewpoint waypoints and an executable route.
pub(crate) fn ground_path(
    ctx: &PlanningContext,
    communities: Vec<CommunityId>,
    terminal: NodeId,
    rationale: String,
) -> Result<GlobalPath, PlanError> {
    let target_community = *communities.last().ok_or(PlanError::EmptyGlobalGraph)?;
    let paths = ShortestPaths::from_node(ctx.graph, ctx.current_node)
        .ok_or(PlanError::UnknownNode(ctx.current_node))?;
    let route = paths
        .path_to(ctx.graph, terminal)
        .ok_or(PlanError::Deadlock)?;
    let mut waypoints = vec![ctx.current_node];
    if communities.len() > 2 {
        for c in &communities[1..communities.len() - 1] {
            let rep = ctx
                .global
                .node(*c)
                .ok_or(PlanError::UnknownCommunity(*c))?
                .representative;
            if waypoints.last() != Some(&rep) {
                waypoints.push(rep);
            }
        }
    }
    if waypoints.last() != Some(&terminal) {
        waypoints.push(terminal);
    }
    Ok(GlobalPath {
        communities,
        waypoints,
        target_community,
        terminal,
        route,
        rationale,
    })
}

/// Checks a community sequence proposed by an external reasoner.
pub fn validate_community_path(
    ctx: &PlanningContext,
    communities: &[CommunityId],
) -> Result<NodeId, PlanError> {
    let current = ctx.current_community()?;
    let Some(&first) = communities.first() else {
        return Err(PlanError::InvalidPath("empty waypoint list".into()));
    };
    if first != current {
        return Err(PlanError::InvalidPath(format!(
            "starts at {first}, robot is in {current}"
        )));
    }
    for w in communities.windows(2) {
        if !ctx.global.are_adjacent(w[0], w[1]) {
            return Err(PlanError::InvalidPath(format!(
                "{} and {} are not adjacent",
                w[0], w[1]
            )));
        }
    }
    let target = *communities.last().unwrap();
    let node = ctx
        .global
        .node(target)
        .ok_or(PlanError::InvalidPath(format!(
            "unknown community {target}"
        )))?;
    let paths = ShortestPaths::from_node(ctx.graph, ctx.current_node)
        .ok_or(PlanError::UnknownNode(ctx.current_node))?;
    terminal_of(node, ctx, &paths)
        .map(|(t, _)| t)
        .ok_or(PlanError::InvalidPath(format!(
            "community {target} has nothing left to explore"
        )))
}
