//! Fast thinking: informative graph, masked-attention policy, guidance
//! reward and policy-gradient training.

mod attention;
mod heuristic;
mod informative;
mod matrix;
mod policy;
mod reward;
mod train;

use thiserror::Error;

pub use attention::{
    attention_layer, attention_weights, masked_attention, AttentionMask, LayerParams,
    LAYER_NORM_EPS,
};
pub use heuristic::guidepost_heuristic;
pub use informative::{build_informative_graph, GuidanceContext, InformativeGraph};
pub use matrix::Matrix;
pub use policy::{
    backward, forward_cached, policy_forward, select_waypoint, softmax, ActionDistribution,
    ForwardCache, PolicyParams, SelectionMode, INPUT_FEATURES, LOGIT_CLIP,
};
pub use reward::{
    deviation, instruction_reward, reward_from_parts, step_reward, Deviation, RewardConfig,
};
pub use train::{
    batch_loss, batch_loss_gradient, smoothed, train_policy, Adam, Sample, TrainConfig,
    TrainReport, TrainRow,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FastError {
    #[error("attention row {0} has no permitted entry")]
    DegenerateRow(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("informative graph is empty")]
    EmptyGraph,
    #[error("current node has no neighbor to move to")]
    NoAction,
    #[error("deviation {0} is outside [0, 1]")]
    Domain(f64),
    #[error("node resolution must be positive, got {0}")]
    InvalidResolution(f64),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("training diverged at iteration {iteration}: {detail}")]
    Diverged { iteration: usize, detail: String },
    #[error("environment: {0}")]
    Environment(String),
}
