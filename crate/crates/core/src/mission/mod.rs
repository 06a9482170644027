//! Episode orchestration, the greedy baseline, benchmarks, logs and rendering.

mod bench;
mod config;
mod episode;
mod log;
mod render;

use thiserror::Error;

use crate::community::CommunityError;
use crate::fast::FastError;
use crate::graph::{GraphError, NodeId};
use crate::gridworld::GridError;
use crate::slow::{PlanError, SlowError};

pub use bench::{benchmark, config_label, BenchReport, BenchRow, EpisodeResult};
pub use config::{LocalPolicy, MapSpec, Method, MissionConfig, ReasonerBackend};
pub use episode::{
    reasoner_from_config, run_baseline_greedy, run_episode, Controller, Episode, Observation,
    StepOutcome,
};
pub use log::{EpisodeLog, EpisodeSummary, LogEntry, PlanRecord, StepRecord};
pub use render::{community_color, render_belief, render_trajectory};

#[derive(Debug, Error)]
pub enum MissionError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Community(#[from] CommunityError),
    #[error(transparent)]
    Slow(#[from] SlowError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Fast(#[from] FastError),
    #[error("move {from} -> {to} is not a graph edge")]
    InvalidMove { from: NodeId, to: NodeId },
    #[error("deadlock: {0}")]
    Deadlock(String),
}
