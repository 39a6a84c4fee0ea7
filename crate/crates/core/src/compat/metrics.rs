//! Label normalization and the three agreement metrics.

use crate::corpus::LabelScheme;
use crate::error::{Error, Result};

pub const DEFAULT_BINS: usize = 10;

/// Probabilities over `B >= 2` bins, summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::validation(format!(
                "a distribution needs >= 2 bins, got {}",
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::validation(format!("invalid probability {p}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::validation(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Distribution(probs))
    }

    pub fn bins(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `level / (L - 1)`.
pub fn normalize_level(scheme: &LabelScheme, level: usize) -> Result<f64> {
    scheme.check_index(level)?;
    Ok(level as f64 / (scheme.len() - 1) as f64)
}

/// Equal-width histogram over [0, 1]; the last bin includes 1.0.
pub fn label_histogram(scores: &[f64], bins: usize) -> Result<Distribution> {
    if scores.is_empty() {
        return Err(Error::validation("cannot build a histogram of zero scores"));
    }
    if bins < 2 {
        return Err(Error::validation(format!("bin count must be >= 2, got {bins}")));
    }
    let mut counts = vec![0usize; bins];
    for &s in scores {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::validation(format!("unit score {s} outside [0, 1]")));
        }
        let b = ((s * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let n = scores.len() as f64;
    Distribution::new(counts.into_iter().map(|c| c as f64 / n).collect())
}

fn kl2(p: &[f64], m: &[f64]) -> f64 {
    p.iter()
        .zip(m)
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(pi, mi)| pi * (pi / mi).log2())
        .sum()
}

/// `1 - (KL(P||M) + KL(Q||M)) / 2` with `M = (P + Q) / 2`, base-2 logs.
pub fn rjsd(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.bins() != q.bins() {
        return Err(Error::validation(format!(
            "bin count mismatch: {} vs {}",
            p.bins(),
            q.bins()
        )));
    }
    let m: Vec<f64> = p.0.iter().zip(&q.0).map(|(a, b)| (a + b) / 2.0).collect();
    let jsd = (kl2(&p.0, &m) + kl2(&q.0, &m)) / 2.0;
    // Only rounding can push the divergence outside [0, 1].
    Ok((1.0 - jsd).clamp(0.0, 1.0))
}

/// Ranks 1..=n in ascending order of value; ties keep input order.
pub fn to_ranks(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0; values.len()];
    for (r, &i) in order.iter().enumerate() {
        ranks[i] = r + 1;
    }
    ranks
}

fn check_permutation(ranks: &[usize]) -> Result<()> {
    let mut seen = vec![false; ranks.len()];
    for &r in ranks {
        if r == 0 || r > ranks.len() || seen[r - 1] {
            return Err(Error::validation(format!(
                "ranks are not a permutation of 1..={}",
                ranks.len()
            )));
        }
        seen[r - 1] = true;
    }
    Ok(())
}

/// `1 - 1 / (1 + sqrt(sum (A_i - B_i)^2 / sum i^2))`.
///
/// Identical rankings score 0 and the value grows as the rankings diverge.
pub fn rrnss(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::validation(format!(
            "rank length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::validation("cannot compare empty rankings"));
    }
    check_permutation(a)?;
    check_permutation(b)?;
    let n = a.len() as f64;
    let ssd: f64 = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum();
    let norm = n * (n + 1.0) * (2.0 * n + 1.0) / 6.0;
    Ok(1.0 - 1.0 / (1.0 + (ssd / norm).sqrt()))
}

fn dcg(rel: impl Iterator<Item = f64>) -> f64 {
    rel.enumerate().map(|(i, r)| r / ((i + 2) as f64).log2()).sum()
}

/// DCG of `relevance` (already in predicted order) over the ideal DCG, k = n.
pub fn ndcg(relevance: &[f64]) -> Result<f64> {
    if relevance.is_empty() {
        return Err(Error::validation("cannot compute NDCG of zero documents"));
    }
    if let Some(r) = relevance.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(Error::validation(format!("invalid relevance {r}")));
    }
    let mut ideal = relevance.to_vec();
    ideal.sort_by(|a, b| b.total_cmp(a));
    let idcg = dcg(ideal.into_iter());
    if idcg == 0.0 {
        return Err(Error::validation("all relevances are zero (IDCG = 0)"));
    }
    Ok(dcg(relevance.iter().copied()) / idcg)
}

/// Relevances `1 + truth level` listed in descending order of predicted
/// score, ties by position.
pub fn relevance_in_predicted_order(predicted: &[f64], truth_levels: &[usize]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..predicted.len()).collect();
    order.sort_by(|&a, &b| predicted[b].total_cmp(&predicted[a]));
    order.iter().map(|&i| 1.0 + truth_levels[i] as f64).collect()
}
