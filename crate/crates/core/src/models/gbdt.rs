//! One-vs-rest gradient-boosted regression trees on the logistic loss,
//! with histogram (pre-binned) split search.

use serde::{Deserialize, Serialize};

use super::Classifier;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbdtParams {
    pub trees: usize,
    pub depth: usize,
    pub shrinkage: f64,
    pub max_bins: usize,
    /// L2 penalty on leaf values.
    pub lambda: f64,
    pub min_child_weight: f64,
}

impl Default for GbdtParams {
    fn default() -> Self {
        GbdtParams {
            trees: 60,
            depth: 3,
            shrinkage: 0.3,
            max_bins: 32,
            lambda: 1.0,
            min_child_weight: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// `x[feature] <= threshold` goes left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf(v) => return v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }
}

/// `trees[round][class]`; class score is `base[class]` plus the tree outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct GbdtModel {
    pub n_features: usize,
    pub base: Vec<f64>,
    pub trees: Vec<Vec<Tree>>,
}

impl Classifier for GbdtModel {
    fn scores(&self, x: &[f64]) -> Vec<f64> {
        let mut s = self.base.clone();
        for round in &self.trees {
            for (c, t) in round.iter().enumerate() {
                s[c] += t.predict(x);
            }
        }
        s
    }
}

/// Split thresholds for one feature: midpoints between distinct values,
/// thinned to at most `max_bins - 1` cuts.
fn thresholds(values: &mut Vec<f64>, max_bins: usize) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    values.dedup();
    let u = values.len();
    if u < 2 {
        return Vec::new();
    }
    let cuts = (u - 1).min(max_bins.max(2) - 1);
    let mut out: Vec<f64> = (1..=cuts)
        .map(|k| {
            let idx = (k * (u - 1)) / cuts;
            let idx = idx.clamp(1, u - 1);
            0.5 * (values[idx - 1] + values[idx])
        })
        .collect();
    out.dedup();
    out
}

struct Binned {
    /// `bins[f][i]` = number of thresholds of `f` strictly below `x[i][f]`.
    bins: Vec<Vec<u16>>,
    thresholds: Vec<Vec<f64>>,
}

fn bin_rows(rows: &[Vec<f64>], max_bins: usize) -> Binned {
    let d = rows[0].len();
    let mut bins = Vec::with_capacity(d);
    let mut all = Vec::with_capacity(d);
    for f in 0..d {
        let mut col: Vec<f64> = rows.iter().map(|r| r[f]).collect();
        let th = thresholds(&mut col, max_bins);
        bins.push(rows.iter().map(|r| th.partition_point(|&t| t < r[f]) as u16).collect());
        all.push(th);
    }
    Binned { bins, thresholds: all }
}

struct Builder<'a> {
    binned: &'a Binned,
    grad: &'a [f64],
    hess: &'a [f64],
    params: &'a GbdtParams,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn leaf_value(&self, g: f64, h: f64) -> f64 {
        -g / (h + self.params.lambda) * self.params.shrinkage
    }

    fn build(&mut self, samples: &[usize], depth: usize) -> usize {
        let (g, h) = samples
            .iter()
            .fold((0.0, 0.0), |(g, h), &i| (g + self.grad[i], h + self.hess[i]));
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(self.leaf_value(g, h)));
        if depth >= self.params.depth || samples.len() < 2 {
            return id;
        }
        let lambda = self.params.lambda;
        let parent = g * g / (h + lambda);
        let mut best: Option<(f64, usize, usize)> = None;
        for (f, th) in self.binned.thresholds.iter().enumerate() {
            if th.is_empty() {
                continue;
            }
            let mut hist = vec![(0.0f64, 0.0f64); th.len() + 1];
            for &i in samples {
                let b = self.binned.bins[f][i] as usize;
                hist[b].0 += self.grad[i];
                hist[b].1 += self.hess[i];
            }
            let (mut gl, mut hl) = (0.0, 0.0);
            for (b, &(bg, bh)) in hist.iter().enumerate().take(th.len()) {
                gl += bg;
                hl += bh;
                let (gr, hr) = (g - gl, h - hl);
                if hl < self.params.min_child_weight || hr < self.params.min_child_weight {
                    continue;
                }
                let gain = gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent;
                // Strict improvement keeps the lowest feature, then lowest threshold, on ties.
                if gain > 1e-12 && best.is_none_or(|(bg, _, _)| gain > bg) {
                    best = Some((gain, f, b));
                }
            }
        }
        let Some((_, feature, bin)) = best else {
            return id;
        };
        let (left, right): (Vec<usize>, Vec<usize>) = samples
            .iter()
            .partition(|&&i| (self.binned.bins[feature][i] as usize) <= bin);
        if left.is_empty() || right.is_empty() {
            return id;
        }
        let l = self.build(&left, depth + 1);
        let r = self.build(&right, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold: self.binned.thresholds[feature][bin],
            left: l,
            right: r,
        };
        id
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn logistic_loss(margin: f64, y: f64) -> f64 {
    // log(1 + exp(-s * z)) with s = +1/-1, computed stably.
    let z = if y > 0.5 { margin } else { -margin };
    if z > 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

/// Mean one-vs-rest logistic loss of the current margins.
fn mean_loss(margins: &[Vec<f64>], labels: &[usize]) -> f64 {
    let mut total = 0.0;
    let mut count = 0usize;
    for (m, &y) in margins.iter().zip(labels) {
        for (c, &z) in m.iter().enumerate() {
            total += logistic_loss(z, f64::from(u8::from(c == y)));
            count += 1;
        }
    }
    total / count as f64
}

/// Train and return the model plus the training loss before boosting and
/// after each round.
pub fn fit_gbdt(rows: &[Vec<f64>], labels: &[usize], n_classes: usize, params: &GbdtParams) -> (GbdtModel, Vec<f64>) {
    let n = rows.len();
    let binned = bin_rows(rows, params.max_bins);
    let mut counts = vec![0usize; n_classes];
    for &y in labels {
        counts[y] += 1;
    }
    let base: Vec<f64> = counts
        .iter()
        .map(|&c| {
            let p = (c as f64 / n as f64).clamp(1e-6, 1.0 - 1e-6);
            (p / (1.0 - p)).ln()
        })
        .collect();
    let mut margins: Vec<Vec<f64>> = vec![base.clone(); n];
    let mut losses = vec![mean_loss(&margins, labels)];
    let mut trees = Vec::with_capacity(params.trees);
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    let all: Vec<usize> = (0..n).collect();
    for _ in 0..params.trees {
        let mut round = Vec::with_capacity(n_classes);
        for c in 0..n_classes {
            for i in 0..n {
                let p = sigmoid(margins[i][c]);
                grad[i] = p - f64::from(u8::from(labels[i] == c));
                hess[i] = (p * (1.0 - p)).max(1e-12);
            }
            let mut b = Builder {
                binned: &binned,
                grad: &grad,
                hess: &hess,
                params,
                nodes: Vec::new(),
            };
            b.build(&all, 0);
            let tree = Tree { nodes: b.nodes };
            for (i, m) in margins.iter_mut().enumerate() {
                m[c] += tree.predict(&rows[i]);
            }
            round.push(tree);
        }
        trees.push(round);
        losses.push(mean_loss(&margins, labels));
    }
    (
        GbdtModel {
            n_features: rows[0].len(),
            base,
            trees,
        },
        losses,
    )
}
