//! Baseline-subtracted REINFORCE with Adam on small procedural maps.

use std::fmt::Write as _;
use std::sync::Arc;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::informative::InformativeGraph;
use super::policy::{backward, forward_cached, select_waypoint, PolicyParams, SelectionMode};
use super::FastError;
use crate::gridworld::{generate_map, MapKind};
use crate::mission::{Controller, Episode, MissionConfig};
use crate::slow::Reasoner;

/// One decision with its advantage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub graph: InformativeGraph,
    /// Index into the candidate list of the action distribution.
    pub action: usize,
    pub advantage: f64,
}

/// `-(1/B) sum_b A_b log p(a_b)`.
pub fn batch_loss(params: &PolicyParams, samples: &[Sample]) -> Result<f64, FastError> {
    let mut total = 0.0;
    for s in samples {
        let cache = forward_cached(&s.graph, params)?;
        total -= s.advantage * cache.dist.probs[s.action].ln();
    }
    Ok(total / samples.len().max(1) as f64)
}

/// Loss and its gradient w.r.t. every parameter.
pub fn batch_loss_gradient(
    params: &PolicyParams,
    samples: &[Sample],
) -> Result<(f64, PolicyParams), FastError> {
    let mut grad = params.zeros_like();
    let scale = 1.0 / samples.len().max(1) as f64;
    let mut total = 0.0;
    for s in samples {
        let cache = forward_cached(&s.graph, params)?;
        let p = &cache.dist.probs;
        total -= s.advantage * p[s.action].ln();
        // d(-A log p_a)/d logit_j = -A (1[j = a] - p_j)
        let d_logits: Vec<f64> = (0..p.len())
            .map(|j| -s.advantage * scale * (f64::from(u8::from(j == s.action)) - p[j]))
            .collect();
        backward(&cache, params, &d_logits, &mut grad);
    }
    Ok((total * scale, grad))
}

#[derive(Clone, Debug)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: PolicyParams,
    v: PolicyParams,
    t: i32,
}

impl Adam {
    pub fn new(params: &PolicyParams, lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: params.zeros_like(),
            v: params.zeros_like(),
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut PolicyParams, grad: &PolicyParams) {
        self.t += 1;
        let (b1, b2) = (self.beta1, self.beta2);
        let c1 = 1.0 - b1.powi(self.t);
        let c2 = 1.0 - b2.powi(self.t);
        let grads: Vec<&Vec<f64>> = grad.named().into_iter().map(|(_, m)| &m.data).collect();
        for (((p, m), v), g) in params
            .tensors_mut()
            .into_iter()
            .zip(self.m.tensors_mut())
            .zip(self.v.tensors_mut())
            .zip(grads)
        {
            for i in 0..p.data.len() {
                m.data[i] = b1 * m.data[i] + (1.0 - b1) * g[i];
                v.data[i] = b2 * v.data[i] + (1.0 - b2) * g[i] * g[i];
                p.data[i] -= self.lr * (m.data[i] / c1) / ((v.data[i] / c2).sqrt() + self.eps);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub iterations: usize,
    /// Training maps, all used in every iteration.
    pub maps: usize,
    pub map_size: usize,
    pub max_steps: usize,
    pub d_f: usize,
    pub layers: usize,
    pub learning_rate: f64,
    pub gamma: f64,
    pub seed: u64,
    /// Trailing window of the smoothed return curve.
    pub smoothing: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            iterations: 200,
            maps: 6,
            map_size: 20,
            max_steps: 40,
            d_f: 16,
            layers: 2,
            learning_rate: 3e-3,
            gamma: 0.95,
            seed: 7,
            smoothing: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainRow {
    pub iteration: usize,
    pub mean_return: f64,
    pub smoothed_return: f64,
    pub mean_deviation: f64,
    pub coverage: f64,
    pub loss: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub params: PolicyParams,
    pub rows: Vec<TrainRow>,
}

impl TrainReport {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("iteration,mean_return,smoothed_return,mean_deviation,coverage,loss\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.6},{:.6},{:.6},{:.6},{:.6}",
                r.iteration, r.mean_return, r.smoothed_return, r.mean_deviation, r.coverage, r.loss
            );
        }
        out
    }
}

/// Trailing mean over `window` entries. Entries before the first full window
/// take the first full window's mean.
pub fn smoothed(values: &[f64], window: usize) -> Vec<f64> {
    let w = window.clamp(1, values.len().max(1));
    (0..values.len())
        .map(|i| {
            let end = (i + 1).max(w);
            let slice = &values[end - w..end];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect()
}

struct Rollout {
    samples: Vec<(InformativeGraph, usize)>,
    rewards: Vec<f64>,
    deviations: Vec<f64>,
    coverage: f64,
}

fn rollout(
    params: &Arc<PolicyParams>,
    cfg: &MissionConfig,
    map_seed: u64,
    kind: MapKind,
    rng_seed: u64,
) -> Result<Rollout, FastError> {
    let env = |e: crate::mission::MissionError| FastError::Environment(e.to_string());
    let truth = generate_map(
        kind,
        map_seed,
        cfg.map.width,
        cfg.map.height,
        cfg.map.resolution,
    )
    .map_err(|e| FastError::Environment(e.to_string()))?;
    let controller = Controller::Network(params.clone(), SelectionMode::Sample);
    let mut ep =
        Episode::with_parts(cfg.clone(), truth, controller, Reasoner::Rule).map_err(env)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out = Rollout {
        samples: Vec::new(),
        rewards: Vec::new(),
        deviations: Vec::new(),
        coverage: 0.0,
    };
    while let Ok(Some(obs)) = ep.observe() {
        let cache = match forward_cached(&obs.graph, params) {
            Ok(c) => c,
            Err(FastError::NoAction) => break,
            Err(e) => return Err(e),
        };
        let action = select_waypoint(&cache.dist, SelectionMode::Sample, &mut rng);
        let target = cache.dist.ids[action];
        let record = ep.execute(target, obs.guided).map_err(env)?;
        out.samples.push((obs.graph, action));
        out.rewards.push(record.reward);
        out.deviations.push(record.deviation.unwrap_or(0.0));
        out.coverage = record.coverage;
    }
    Ok(out)
}

const KINDS: [MapKind; 3] = [MapKind::Indoor, MapKind::Forest, MapKind::Warehouse];

/// Trains a fresh policy. The same training maps are used every iteration
/// so the return curve tracks the policy rather than map difficulty.
pub fn train_policy(tc: &TrainConfig) -> Result<TrainReport, FastError> {
    let mut params = PolicyParams::random(tc.d_f, tc.layers, tc.seed);
    let mut adam = Adam::new(&params, tc.learning_rate);
    let cfg = MissionConfig {
        map: crate::mission::MapSpec {
            width: tc.map_size,
            height: tc.map_size,
            ..Default::default()
        },
        step_cap: tc.max_steps,
        ..Default::default()
    };
    let mut raw_returns = Vec::with_capacity(tc.iterations);
    let mut rows = Vec::with_capacity(tc.iterations);
    for it in 0..tc.iterations {
        let shared = Arc::new(params.clone());
        let jobs: Vec<(u64, MapKind, u64)> = (0..tc.maps)
            .map(|m| {
                let map_seed = tc.seed.wrapping_mul(1000).wrapping_add(m as u64);
                let rng_seed = tc.seed ^ ((it as u64) << 20) ^ m as u64;
                (map_seed, KINDS[m % KINDS.len()], rng_seed)
            })
            .collect();
        let run = |&(map_seed, kind, rng_seed): &(u64, MapKind, u64)| {
            rollout(&shared, &cfg, map_seed, kind, rng_seed)
        };
        #[cfg(feature = "parallel")]
        let rollouts: Vec<Result<Rollout, FastError>> = jobs.par_iter().map(run).collect();
        #[cfg(not(feature = "parallel"))]
        let rollouts: Vec<Result<Rollout, FastError>> = jobs.iter().map(run).collect();
        let rollouts = rollouts.into_iter().collect::<Result<Vec<_>, _>>()?;

        let mut samples = Vec::new();
        let mut returns = Vec::new();
        let mut episode_returns = Vec::new();
        let mut deviations = Vec::new();
        let mut coverage = 0.0;
        for r in rollouts {
            let mut g = 0.0;
            let mut gs = vec![0.0; r.rewards.len()];
            for t in (0..r.rewards.len()).rev() {
                g = r.rewards[t] + tc.gamma * g;
                gs[t] = g;
            }
            episode_returns.push(r.rewards.iter().sum::<f64>());
            deviations.extend(r.deviations);
            coverage += r.coverage;
            for ((graph, action), g) in r.samples.into_iter().zip(gs) {
                samples.push(Sample {
                    graph,
                    action,
                    advantage: 0.0,
                });
                returns.push(g);
            }
        }
        let (mean, std) = crate::numeric::mean_std(&returns);
        for (s, g) in samples.iter_mut().zip(&returns) {
            s.advantage = (g - mean) / (std + 1e-8);
        }
        let (loss, grad) = batch_loss_gradient(&params, &samples)?;
        if !loss.is_finite() || !grad.is_finite() {
            return Err(FastError::Diverged {
                iteration: it + 1,
                detail: format!(
                    "loss {loss}, gradient finite {}, {} samples; last good parameters:\n{}",
                    grad.is_finite(),
                    samples.len(),
                    params.to_checkpoint()
                ),
            });
        }
        adam.step(&mut params, &grad);
        let mean_return = episode_returns.iter().sum::<f64>() / episode_returns.len().max(1) as f64;
        raw_returns.push(mean_return);
        rows.push(TrainRow {
            iteration: it + 1,
            mean_return,
            smoothed_return: 0.0,
            mean_deviation: deviations.iter().sum::<f64>() / deviations.len().max(1) as f64,
            coverage: coverage / tc.maps.max(1) as f64,
            loss,
        });
    }
    for (row, s) in rows.iter_mut().zip(smoothed(&raw_returns, tc.smoothing)) {
        row.smoothed_return = s;
    }
    Ok(TrainReport { params, rows })
}
