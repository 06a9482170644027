use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::attention::{layer_backward, layer_forward, AttentionMask, LayerCache, LayerParams};
use super::informative::InformativeGraph;
use super::matrix::{dot, Matrix};
use super::FastError;
use crate::graph::NodeId;

pub const INPUT_FEATURES: usize = 4;
/// Pointer logits are squashed into `[-C, C]`.
pub const LOGIT_CLIP: f64 = 10.0;

/// Encoder and pointer-decoder weights.
///
/// The decoder query sees the current node's embedding next to the mean
/// embedding of guidepost nodes and of nodes on the executed trail, so both
/// readings of the path context are available.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub d_f: usize,
    /// `d_f x 4`.
    pub embed: Matrix,
    /// `1 x d_f`.
    pub embed_bias: Matrix,
    pub layers: Vec<LayerParams>,
    /// `d_f x 3 d_f`.
    pub dec_query: Matrix,
    /// `d_f x d_f`.
    pub dec_key: Matrix,
}

impl PolicyParams {
    pub const DEFAULT_WIDTH: usize = 64;
    pub const DEFAULT_LAYERS: usize = 3;

    pub fn random(d_f: usize, layers: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            d_f,
            embed: Matrix::glorot(d_f, INPUT_FEATURES, &mut rng),
            embed_bias: Matrix::random(1, d_f, 0.1, &mut rng),
            layers: (0..layers)
                .map(|_| LayerParams::random(d_f, &mut rng))
                .collect(),
            dec_query: Matrix::glorot(d_f, 3 * d_f, &mut rng),
            dec_key: Matrix::glorot(d_f, d_f, &mut rng),
        }
    }

    /// Same shapes, all zeros.
    pub fn zeros_like(&self) -> Self {
        let d = self.d_f;
        Self {
            d_f: d,
            embed: Matrix::zeros(d, INPUT_FEATURES),
            embed_bias: Matrix::zeros(1, d),
            layers: self.layers.iter().map(|_| LayerParams::zeros(d)).collect(),
            dec_query: Matrix::zeros(d, 3 * d),
            dec_key: Matrix::zeros(d, d),
        }
    }

    /// Tensors in checkpoint order, with names.
    pub fn named(&self) -> Vec<(String, &Matrix)> {
        let mut out = vec![
            ("embed".to_string(), &self.embed),
            ("embed_bias".to_string(), &self.embed_bias),
        ];
        for (l, p) in self.layers.iter().enumerate() {
            out.push((format!("layer{l}.wq"), &p.wq));
            out.push((format!("layer{l}.wk"), &p.wk));
            out.push((format!("layer{l}.wv"), &p.wv));
        }
        out.push(("dec_query".to_string(), &self.dec_query));
        out.push(("dec_key".to_string(), &self.dec_key));
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Matrix> {
        let mut out = vec![&mut self.embed, &mut self.embed_bias];
        for p in &mut self.layers {
            out.push(&mut p.wq);
            out.push(&mut p.wk);
            out.push(&mut p.wv);
        }
        out.push(&mut self.dec_query);
        out.push(&mut self.dec_key);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.named().iter().all(|(_, m)| m.is_finite())
    }

    pub fn parameter_count(&self) -> usize {
        self.named().iter().map(|(_, m)| m.data.len()).sum()
    }

    /// Text checkpoint: a version line, the shape header, then one
    /// `tensor <name> <rows> <cols>` line followed by its values per tensor.
    pub fn to_checkpoint(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "explore-policy 1");
        let _ = writeln!(out, "d_f {}", self.d_f);
        let _ = writeln!(out, "layers {}", self.layers.len());
        for (name, m) in self.named() {
            let _ = writeln!(out, "tensor {name} {} {}", m.rows, m.cols);
            let values: Vec<String> = m.data.iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(out, "{}", values.join(" "));
        }
        out
    }

    pub fn from_checkpoint(text: &str) -> Result<Self, FastError> {
        let bad = |msg: &str| FastError::Checkpoint(msg.to_string());
        let mut lines = text.lines();
        if lines.next() != Some("explore-policy 1") {
            return Err(bad("missing or unsupported version line"));
        }
        let mut header = |key: &str| -> Result<usize, FastError> {
            lines
                .next()
                .and_then(|l| l.strip_prefix(key))
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| bad(&format!("expected `{key}` line")))
        };
        let d_f = header("d_f ")?;
        let layers = header("layers ")?;
        if d_f == 0 {
            return Err(bad("d_f must be positive"));
        }
        let mut params = PolicyParams::random(d_f, layers, 0).zeros_like();
        let names: Vec<String> = params.named().into_iter().map(|(n, _)| n).collect();
        for (name, tensor) in names.iter().zip(params.tensors_mut()) {
            let head = lines.next().ok_or_else(|| bad("truncated"))?;
            let parts: Vec<&str> = head.split_whitespace().collect();
            let expected = [
                "tensor".to_string(),
                name.clone(),
                tensor.rows.to_string(),
                tensor.cols.to_string(),
            ];
            if parts != expected.iter().map(String::as_str).collect::<Vec<_>>() {
                return Err(bad(&format!(
                    "expected `{}`, found `{head}`",
                    expected.join(" ")
                )));
            }
            let values: Vec<f64> = lines
                .next()
                .ok_or_else(|| bad("truncated"))?
                .split_whitespace()
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| bad(&format!("bad value `{v}`")))
                })
                .collect::<Result<_, _>>()?;
            if values.len() != tensor.data.len() {
                return Err(bad(&format!("tensor {name} has {} values", values.len())));
            }
            tensor.data = values;
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(bad("trailing content"));
        }
        if !params.is_finite() {
            return Err(bad("non-finite values"));
        }
        Ok(params)
    }
}

/// Distribution over the current node's neighbors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionDistribution {
    /// Indices into the informative graph, ascending by node id.
    pub candidates: Vec<usize>,
    pub ids: Vec<NodeId>,
    pub probs: Vec<f64>,
}

/// Forward-pass state needed for backpropagation.
#[derive(Clone, Debug)]
pub struct ForwardCache {
    x: Matrix,
    mask: AttentionMask,
    layers: Vec<LayerCache>,
    h: Matrix,
    guide: Vec<usize>,
    trail: Vec<usize>,
    context: Vec<f64>,
    query: Vec<f64>,
    keys: Vec<Vec<f64>>,
    tanh: Vec<f64>,
    current: usize,
    pub dist: ActionDistribution,
}

/// Column means over `rows`, zero when empty. Summation is exact so the
/// result does not depend on row order.
fn mean_rows(h: &Matrix, rows: &[usize]) -> Vec<f64> {
    if rows.is_empty() {
        return vec![0.0; h.cols];
    }
    let n = rows.len() as f64;
    (0..h.cols)
        .map(|c| crate::numeric::fsum(rows.iter().map(|&r| h.get(r, c))) / n)
        .collect()
}

pub fn policy_forward(
    graph: &InformativeGraph,
    params: &PolicyParams,
) -> Result<ActionDistribution, FastError> {
    forward_cached(graph, params).map(|c| c.dist)
}

pub fn forward_cached(
    graph: &InformativeGraph,
    params: &PolicyParams,
) -> Result<ForwardCache, FastError> {
    if graph.is_empty() {
        return Err(FastError::EmptyGraph);
    }
    let candidates = graph.current_neighbors();
    if candidates.is_empty() {
        return Err(FastError::NoAction);
    }
    let d = params.d_f;
    let x = Matrix::from_rows(
        &graph
            .features
            .iter()
            .map(|f| f.to_vec())
            .collect::<Vec<_>>(),
    );
    let mut h = x.linear(&params.embed);
    for i in 0..h.rows {
        for (v, b) in h.row_mut(i).iter_mut().zip(&params.embed_bias.data) {
            *v += b;
        }
    }
    let mask = AttentionMask::from_edges(graph.len(), &graph.edges);
    let mut caches = Vec::with_capacity(params.layers.len());
    for layer in &params.layers {
        let c = layer_forward(&h, &mask, layer)?;
        h = c.output().clone();
        caches.push(c);
    }

    let guide: Vec<usize> = (0..graph.len()).filter(|&i| graph.guidepost(i)).collect();
    let trail: Vec<usize> = (0..graph.len()).filter(|&i| graph.visited[i]).collect();
    let mut context = h.row(graph.current).to_vec();
    context.extend(mean_rows(&h, &guide));
    context.extend(mean_rows(&h, &trail));
    let query = params.dec_query.apply(&context);
    let scale = (d as f64).sqrt();
    let keys: Vec<Vec<f64>> = candidates
        .iter()
        .map(|&j| params.dec_key.apply(h.row(j)))
        .collect();
    let tanh: Vec<f64> = keys
        .iter()
        .map(|k| (dot(&query, k) / scale).tanh())
        .collect();
    let logits: Vec<f64> = tanh.iter().map(|t| LOGIT_CLIP * t).collect();
    let probs = softmax(&logits);
    let ids = candidates.iter().map(|&i| graph.ids[i]).collect();
    Ok(ForwardCache {
        x,
        mask,
        layers: caches,
        h,
        guide,
        trail,
        context,
        query,
        keys,
        tanh,
        current: graph.current,
        dist: ActionDistribution {
            candidates,
            ids,
            probs,
        },
    })
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let total = crate::numeric::fsum(exps.iter().copied());
    exps.iter().map(|e| e / total).collect()
}

/// Accumulates into `grad` the gradient of `sum_j d_logits[j] * logit_j`.
pub fn backward(
    cache: &ForwardCache,
    params: &PolicyParams,
    d_logits: &[f64],
    grad: &mut PolicyParams,
) {
    let d = params.d_f;
    let scale = (d as f64).sqrt();
    let n = cache.h.rows;
    let mut dh = Matrix::zeros(n, d);

    let mut d_query = vec![0.0; d];
    for (t, &j) in cache.dist.candidates.iter().enumerate() {
        let ds = d_logits[t] * LOGIT_CLIP * (1.0 - cache.tanh[t] * cache.tanh[t]) / scale;
        if ds == 0.0 {
            continue;
        }
        let dk: Vec<f64> = cache.query.iter().map(|q| ds * q).collect();
        for (a, k) in d_query.iter_mut().zip(&cache.keys[t]) {
            *a += ds * k;
        }
        grad.dec_key.add_outer(&dk, cache.h.row(j));
        for (c, v) in params.dec_key.apply_transposed(&dk).iter().enumerate() {
            dh.add_at(j, c, *v);
        }
    }
    grad.dec_query.add_outer(&d_query, &cache.context);
    let d_context = params.dec_query.apply_transposed(&d_query);
    let current = cache.current;
    for c in 0..d {
        dh.add_at(current, c, d_context[c]);
    }
    for (group, offset) in [(&cache.guide, d), (&cache.trail, 2 * d)] {
        if group.is_empty() {
            continue;
        }
        let share = 1.0 / group.len() as f64;
        for &r in group.iter() {
            for c in 0..d {
                dh.add_at(r, c, d_context[offset + c] * share);
            }
        }
    }

    for l in (0..params.layers.len()).rev() {
        dh = layer_backward(
            &cache.layers[l],
            &cache.mask,
            &params.layers[l],
            &dh,
            &mut grad.layers[l],
        );
    }
    for i in 0..n {
        grad.embed.add_outer(dh.row(i), cache.x.row(i));
        for (b, g) in grad.embed_bias.data.iter_mut().zip(dh.row(i)) {
            *b += g;
        }
    }
}

/// How a waypoint is picked from the distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    Greedy,
    Sample,
}

/// Index into `dist.candidates`. Greedy ties go to the smaller node id,
/// which is the earlier candidate.
pub fn select_waypoint(
    dist: &ActionDistribution,
    mode: SelectionMode,
    rng: &mut impl Rng,
) -> usize {
    match mode {
        SelectionMode::Greedy => {
            let mut best = 0;
            for (i, p) in dist.probs.iter().enumerate() {
                if *p > dist.probs[best] {
                    best = i;
                }
            }
            best
        }
        SelectionMode::Sample => {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            for (i, p) in dist.probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    return i;
                }
            }
            dist.probs.len() - 1
        }
    }
}
