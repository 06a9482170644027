//! Hierarchical autonomous exploration on 2D occupancy grids.
//!
//! A slow global reasoner plans over a community-level abstraction of the
//! collision-free viewpoint graph, and a fast local policy picks the next
//! waypoint among graph neighbours while being rewarded for following the
//! global guidance.
//!
//! Module map:
//!
//! - [`gridworld`]: ground-truth maps, ray-cast sensing, belief, frontiers, metrics.
//! - [`graph`]: viewpoint sampling, the collision-free k-NN graph, utility, local window.
//! - [`community`]: modularity, Louvain detection, top-k pruning, the global graph.
//! - [`slow`]: environment characterization, strategy rules, global path reasoning.
//! - [`fast`]: informative graph, masked attention policy, rewards, training.
//! - [`mission`]: episode loop, greedy baseline, benchmarks, logs and rendering.

// `!(x > 0.0)` is how NaN gets rejected here, and the numeric kernels index
// several parallel arrays per loop.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod community;
pub mod fast;
pub mod geometry;
pub mod graph;
pub mod gridworld;
pub mod mission;
pub mod numeric;
pub mod slow;

pub use geometry::Point;
