use rand::Rng;
use serde::{Deserialize, Serialize};

use super::matrix::{dot, Matrix};
use super::FastError;
use crate::numeric::fsum;

pub const LAYER_NORM_EPS: f64 = 1e-5;

/// Which entries of each attention row are permitted.
///
/// Dense form follows the usual convention `M[i][j] = 0` for permitted pairs
/// (edges and self) and `1` for masked ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttentionMask {
    rows: Vec<Vec<usize>>,
}

impl AttentionMask {
    /// Undirected edges plus self-loops.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut rows: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for &(a, b) in edges {
            rows[a].push(b);
            rows[b].push(a);
        }
        for r in &mut rows {
            r.sort_unstable();
            r.dedup();
        }
        Self { rows }
    }

    pub fn from_dense(m: &[Vec<u8>]) -> Self {
        Self {
            rows: m
                .iter()
                .map(|row| (0..row.len()).filter(|&j| row[j] == 0).collect())
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn allows(&self, i: usize, j: usize) -> bool {
        self.rows[i].binary_search(&j).is_ok()
    }

    pub fn check(&self) -> Result<(), FastError> {
        match self.rows.iter().position(Vec::is_empty) {
            Some(i) => Err(FastError::DegenerateRow(i)),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerParams {
    pub wq: Matrix,
    pub wk: Matrix,
    pub wv: Matrix,
}

impl LayerParams {
    pub fn random(d: usize, rng: &mut impl Rng) -> Self {
        Self {
            wq: Matrix::glorot(d, d, rng),
            wk: Matrix::glorot(d, d, rng),
            wv: Matrix::glorot(d, d, rng),
        }
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            wq: Matrix::zeros(d, d),
            wk: Matrix::zeros(d, d),
            wv: Matrix::zeros(d, d),
        }
    }
}

/// Intermediate values of one layer, kept for the backward pass.
#[derive(Clone, Debug)]
pub struct LayerCache {
    input: Matrix,
    q: Matrix,
    k: Matrix,
    v: Matrix,
    /// Softmax weights over `mask.row(i)`.
    weights: Vec<Vec<f64>>,
    /// Normalized output.
    out: Matrix,
    inv_std: Vec<f64>,
}

impl LayerCache {
    pub fn output(&self) -> &Matrix {
        &self.out
    }
}

fn sparse_weights(q: &Matrix, k: &Matrix, mask: &AttentionMask) -> Vec<Vec<f64>> {
    let scale = (q.cols as f64).sqrt();
    (0..q.rows)
        .map(|i| {
            let scores: Vec<f64> = mask
                .row(i)
                .iter()
                .map(|&j| dot(q.row(i), k.row(j)) / scale)
                .collect();
            let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
            let total = fsum(exps.iter().copied());
            exps.iter().map(|e| e / total).collect()
        })
        .collect()
}

fn aggregate(weights: &[Vec<f64>], v: &Matrix, mask: &AttentionMask) -> Matrix {
    let mut out = Matrix::zeros(v.rows, v.cols);
    let mut terms = Vec::new();
    for i in 0..v.rows {
        for c in 0..v.cols {
            terms.clear();
            terms.extend(
                mask.row(i)
                    .iter()
                    .zip(&weights[i])
                    .map(|(&j, w)| w * v.get(j, c)),
            );
            out.set(i, c, fsum(terms.iter().copied()));
        }
    }
    out
}

/// Row-stochastic attention weights as a dense `n x n` matrix; masked
/// entries are exactly zero.
pub fn attention_weights(
    h: &Matrix,
    mask: &AttentionMask,
    layer: &LayerParams,
) -> Result<Matrix, FastError> {
    check_shapes(h, mask, layer)?;
    let w = sparse_weights(&h.linear(&layer.wq), &h.linear(&layer.wk), mask);
    let mut dense = Matrix::zeros(h.rows, h.rows);
    for i in 0..h.rows {
        for (&j, x) in mask.row(i).iter().zip(&w[i]) {
            dense.set(i, j, *x);
        }
    }
    Ok(dense)
}

/// Attention core without residual or normalization: `h'_i = sum_j w_ij v_j`.
pub fn masked_attention(
    h: &Matrix,
    mask: &AttentionMask,
    layer: &LayerParams,
) -> Result<Matrix, FastError> {
    check_shapes(h, mask, layer)?;
    let w = sparse_weights(&h.linear(&layer.wq), &h.linear(&layer.wk), mask);
    Ok(aggregate(&w, &h.linear(&layer.wv), mask))
}

/// Full layer: attention, residual connection, then layer normalization.
pub fn attention_layer(
    h: &Matrix,
    mask: &AttentionMask,
    layer: &LayerParams,
) -> Result<Matrix, FastError> {
    layer_forward(h, mask, layer).map(|c| c.out)
}

fn check_shapes(h: &Matrix, mask: &AttentionMask, layer: &LayerParams) -> Result<(), FastError> {
    if mask.len() != h.rows {
        return Err(FastError::Shape(format!(
            "mask has {} rows, features {}",
            mask.len(),
            h.rows
        )));
    }
    if layer.wq.cols != h.cols || layer.wq.rows != h.cols {
        return Err(FastError::Shape(format!(
            "weights are {}x{}, width {}",
            layer.wq.rows, layer.wq.cols, h.cols
        )));
    }
    mask.check()
}

pub(crate) fn layer_forward(
    h: &Matrix,
    mask: &AttentionMask,
    layer: &LayerParams,
) -> Result<LayerCache, FastError> {
    check_shapes(h, mask, layer)?;
    let q = h.linear(&layer.wq);
    let k = h.linear(&layer.wk);
    let v = h.linear(&layer.wv);
    let weights = sparse_weights(&q, &k, mask);
    let mut z = aggregate(&weights, &v, mask);
    z.add_assign(h);
    let (out, inv_std) = layer_norm(&z);
    Ok(LayerCache {
        input: h.clone(),
        q,
        k,
        v,
        weights,
        out,
        inv_std,
    })
}

fn layer_norm(z: &Matrix) -> (Matrix, Vec<f64>) {
    let d = z.cols as f64;
    let mut out = Matrix::zeros(z.rows, z.cols);
    let mut inv_std = Vec::with_capacity(z.rows);
    for i in 0..z.rows {
        let row = z.row(i);
        let mean = row.iter().sum::<f64>() / d;
        let var = row.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / d;
        let s = 1.0 / (var + LAYER_NORM_EPS).sqrt();
        for (c, x) in row.iter().enumerate() {
            out.set(i, c, (x - mean) * s);
        }
        inv_std.push(s);
    }
    (out, inv_std)
}

/// Backpropagates `d_out` through one layer, accumulating weight gradients
/// into `grad` and returning the gradient w.r.t. the layer input.
pub(crate) fn layer_backward(
    cache: &LayerCache,
    mask: &AttentionMask,
    layer: &LayerParams,
    d_out: &Matrix,
    grad: &mut LayerParams,
) -> Matrix {
    let n = d_out.rows;
    let d = d_out.cols;
    let df = d as f64;

    // Layer norm.
    let mut dz = Matrix::zeros(n, d);
    for i in 0..n {
        let y = cache.out.row(i);
        let g = d_out.row(i);
        let mean_g = g.iter().sum::<f64>() / df;
        let mean_gy = dot(g, y) / df;
        for c in 0..d {
            dz.set(i, c, cache.inv_std[i] * (g[c] - mean_g - y[c] * mean_gy));
        }
    }

    // Residual branch passes straight through.
    let mut dh = dz.clone();

    // Aggregation and softmax.
    let scale = df.sqrt();
    let mut dq = Matrix::zeros(n, d);
    let mut dk = Matrix::zeros(n, d);
    let mut dv = Matrix::zeros(n, d);
    for i in 0..n {
        let row = mask.row(i);
        let w = &cache.weights[i];
        let dw: Vec<f64> = row
            .iter()
            .map(|&j| dot(dz.row(i), cache.v.row(j)))
            .collect();
        let inner: f64 = w.iter().zip(&dw).map(|(a, b)| a * b).sum();
        for (t, &j) in row.iter().enumerate() {
            for c in 0..d {
                dv.add_at(j, c, w[t] * dz.get(i, c));
            }
            let ds = w[t] * (dw[t] - inner) / scale;
            if ds == 0.0 {
                continue;
            }
            for c in 0..d {
                dq.add_at(i, c, ds * cache.k.get(j, c));
                dk.add_at(j, c, ds * cache.q.get(i, c));
            }
        }
    }

    for (dproj, w, gw) in [
        (&dq, &layer.wq, &mut grad.wq),
        (&dk, &layer.wk, &mut grad.wk),
        (&dv, &layer.wv, &mut grad.wv),
    ] {
        for i in 0..n {
            gw.add_outer(dproj.row(i), cache.input.row(i));
            let back = w.apply_transposed(dproj.row(i));
            for (c, b) in back.iter().enumerate() {
                dh.add_at(i, c, *b);
            }
        }
    }
    dh
}
