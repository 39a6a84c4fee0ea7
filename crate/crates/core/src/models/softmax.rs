//! Multinomial logistic regression trained by mini-batch gradient descent.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Classifier;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftmaxParams {
    pub learning_rate: f64,
    pub epochs: usize,
    /// L2 penalty on the weights (not the biases).
    pub l2: f64,
    pub batch_size: usize,
}

impl Default for SoftmaxParams {
    fn default() -> Self {
        SoftmaxParams {
            learning_rate: 0.1,
            epochs: 300,
            l2: 1e-3,
            batch_size: 32,
        }
    }
}

/// Weights are `n_classes` rows of `n_features + 1` values, bias last.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxModel {
    pub n_classes: usize,
    pub n_features: usize,
    pub weights: Vec<f64>,
}

fn logits_into(weights: &[f64], n_classes: usize, x: &[f64], out: &mut [f64]) {
    let stride = x.len() + 1;
    for (c, o) in out.iter_mut().enumerate().take(n_classes) {
        let row = &weights[c * stride..(c + 1) * stride];
        *o = row[..x.len()].iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + row[x.len()];
    }
}

fn softmax_in_place(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    z.iter_mut().for_each(|v| *v /= sum);
}

/// Mean cross-entropy over `rows` plus `l2 / 2 * |W|^2`, and its gradient.
pub fn loss_and_gradient(
    weights: &[f64],
    rows: &[&[f64]],
    labels: &[usize],
    n_classes: usize,
    l2: f64,
) -> (f64, Vec<f64>) {
    let d = rows.first().map_or(0, |r| r.len());
    let stride = d + 1;
    let mut grad = vec![0.0; weights.len()];
    let mut loss = 0.0;
    let mut p = vec![0.0; n_classes];
    let n = rows.len() as f64;
    for (x, &y) in rows.iter().zip(labels) {
        logits_into(weights, n_classes, x, &mut p);
        softmax_in_place(&mut p);
        loss -= p[y].max(f64::MIN_POSITIVE).ln();
        for c in 0..n_classes {
            let delta = (p[c] - f64::from(u8::from(c == y))) / n;
            let g = &mut grad[c * stride..(c + 1) * stride];
            for (gk, xk) in g[..d].iter_mut().zip(x.iter()) {
                *gk += delta * xk;
            }
            g[d] += delta;
        }
    }
    loss /= n;
    for c in 0..n_classes {
        for k in 0..d {
            let w = weights[c * stride + k];
            loss += 0.5 * l2 * w * w;
            grad[c * stride + k] += l2 * w;
        }
    }
    (loss, grad)
}

pub fn fit_softmax(
    rows: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    params: &SoftmaxParams,
    seed: u64,
) -> SoftmaxModel {
    let d = rows[0].len();
    let mut weights = vec![0.0; n_classes * (d + 1)];
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let batch = params.batch_size.max(1);
    let mut xs: Vec<&[f64]> = Vec::with_capacity(batch);
    let mut ys = Vec::with_capacity(batch);
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch) {
            xs.clear();
            ys.clear();
            for &i in chunk {
                xs.push(&rows[i]);
                ys.push(labels[i]);
            }
            let (_, grad) = loss_and_gradient(&weights, &xs, &ys, n_classes, params.l2);
            for (w, g) in weights.iter_mut().zip(&grad) {
                *w -= params.learning_rate * g;
            }
        }
    }
    SoftmaxModel {
        n_classes,
        n_features: d,
        weights,
    }
}

impl Classifier for SoftmaxModel {
    fn scores(&self, x: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.n_classes];
        logits_into(&self.weights, self.n_classes, x, &mut z);
        z
    }
}
