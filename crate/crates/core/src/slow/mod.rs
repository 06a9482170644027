//! Slow thinking: environment characterization, strategy synthesis and
//! global path reasoning over the pruned community graph.

mod characterize;
mod external;
mod memory;
mod planner;
pub mod schema;
mod strategy;

use thiserror::Error;

use crate::community::CommunityId;
use crate::graph::NodeId;

pub use characterize::characterize_rule_based;
#[cfg(feature = "http")]
pub use external::HttpTransport;
pub use external::{
    characterize, characterize_request, plan_global_path, plan_request, Exchange, PlanResponse,
    Reasoned, Reasoner, RecordingTransport, ReplayTransport, Transport, TransportError,
};
pub use memory::{
    apply, update_memory, EpisodeMemory, IssuedPath, MemoryEvent, MemoryEventKind, MemorySummary,
};
pub use planner::{
    plan_rule, plan_rule_with, score_candidates, validate_community_path, CandidateScore,
    GlobalPath, PlanOutcome, PlannerWeights, PlanningContext,
};
pub use schema::{EnvCharacterization, ExplorationStrategy};
pub use strategy::derive_strategy;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SlowError {
    #[error("environment description is empty")]
    EmptyDescription,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("global graph has no nodes")]
    EmptyGlobalGraph,
    #[error("node {0} is not in the graph")]
    UnknownNode(NodeId),
    #[error("node {0} is not in a retained community")]
    CurrentNotRetained(NodeId),
    #[error("unknown community {0}")]
    UnknownCommunity(CommunityId),
    #[error("frontiers remain but none is reachable")]
    Deadlock,
    #[error("invalid path: {0}")]
    InvalidPath(String),
}
