use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::community::{CommunityId, GlobalBeliefGraph, GlobalNode};
use crate::graph::NodeId;

/// Something that happened during the episode.
///
/// Regions are keyed by viewpoint id because community ids are reassigned on
/// every detection; a community's visit count is the sum over its members.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum MemoryEventKind {
    /// The robot entered the region around a viewpoint.
    EnteredCommunity(NodeId),
    /// The region around a viewpoint turned out to be a dead end.
    DeadEndDetected(NodeId),
    /// A global path (viewpoint waypoints) was issued.
    PathIssued(Vec<NodeId>),
    StepTick,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemoryEvent {
    /// Unique per episode; replaying an applied id is a no-op.
    pub id: u64,
    pub kind: MemoryEventKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IssuedPath {
    pub step: u64,
    pub waypoints: Vec<NodeId>,
}

/// Episode memory consumed by the global reasoner.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMemory {
    pub visits: BTreeMap<NodeId, u32>,
    pub dead_ends: BTreeSet<NodeId>,
    pub issued_paths: Vec<IssuedPath>,
    pub step: u64,
    applied: BTreeSet<u64>,
}

impl EpisodeMemory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn visits_of(&self, id: NodeId) -> u32 {
        self.visits.get(&id).copied().unwrap_or(0)
    }

    /// Summed member visits.
    pub fn community_visits(&self, node: &GlobalNode) -> u32 {
        node.members.iter().map(|m| self.visits_of(*m)).sum()
    }

    pub fn is_dead_end_community(&self, node: &GlobalNode) -> bool {
        node.members.iter().any(|m| self.dead_ends.contains(m))
    }

    /// Compact view sent to external reasoners.
    pub fn summary(&self, global: &GlobalBeliefGraph) -> MemorySummary {
        MemorySummary {
            step: self.step,
            community_visits: global
                .nodes
                .iter()
                .map(|n| (n.community, self.community_visits(n)))
                .filter(|(_, v)| *v > 0)
                .collect(),
            dead_end_communities: global
                .nodes
                .iter()
                .filter(|n| self.is_dead_end_community(n))
                .map(|n| n.community)
                .collect(),
            issued_paths: self.issued_paths.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemorySummary {
    pub step: u64,
    pub community_visits: BTreeMap<CommunityId, u32>,
    pub dead_end_communities: Vec<CommunityId>,
    pub issued_paths: usize,
}

/// Folds one event into memory. Dead ends on unvisited regions count as a
/// visit so the dead-end set stays inside the visited set.
pub fn update_memory(mut memory: EpisodeMemory, event: &MemoryEvent) -> EpisodeMemory {
    apply(&mut memory, event);
    memory
}

pub fn apply(memory: &mut EpisodeMemory, event: &MemoryEvent) {
    if !memory.applied.insert(event.id) {
        return;
    }
    match &event.kind {
        MemoryEventKind::EnteredCommunity(id) => {
            *memory.visits.entry(*id).or_insert(0) += 1;
        }
        MemoryEventKind::DeadEndDetected(id) => {
            let v = memory.visits.entry(*id).or_insert(0);
            if *v == 0 {
                *v = 1;
            }
            memory.dead_ends.insert(*id);
        }
        MemoryEventKind::PathIssued(waypoints) => memory.issued_paths.push(IssuedPath {
            step: memory.step,
            waypoints: waypoints.clone(),
        }),
        MemoryEventKind::StepTick => memory.step += 1,
    }
}
