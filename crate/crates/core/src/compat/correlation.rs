//! Pearson correlation between metric matrices.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::{CompatMatrix, Metric};
use crate::error::{Error, Result};

pub const DEFAULT_PERMUTATIONS: usize = 10_000;

/// Pearson's r from the raw sums formula.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::validation(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::validation(format!(
            "correlation needs >= 3 pairs, got {}",
            x.len()
        )));
    }
    for (name, v) in [("x", x), ("y", y)] {
        if v.iter().all(|&a| a == v[0]) {
            return Err(Error::validation(format!("{name} is constant; correlation undefined")));
        }
    }
    let n = x.len() as f64;
    let (mut sx, mut sy, mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sx += a;
        sy += b;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    let den = ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt();
    if den.is_nan() || den <= 0.0 {
        return Err(Error::validation("zero variance; correlation undefined"));
    }
    Ok((n * sxy - sx * sy) / den)
}

/// r and a two-sided permutation p-value over `permutations` seeded
/// shuffles of `y`: `(1 + #{|r_perm| >= |r|}) / (permutations + 1)`.
pub fn pearson_test(x: &[f64], y: &[f64], permutations: usize, seed: u64) -> Result<(f64, f64)> {
    let r = pearson(x, y)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = y.to_vec();
    let mut extreme = 0usize;
    for _ in 0..permutations {
        shuffled.shuffle(&mut rng);
        if pearson(x, &shuffled)?.abs() >= r.abs() {
            extreme += 1;
        }
    }
    Ok((r, (1 + extreme) as f64 / (permutations + 1) as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub metrics: [Metric; 3],
    /// `r[i][j]` correlates `metrics[i]` with `metrics[j]`.
    pub r: [[f64; 3]; 3],
    pub p: [[f64; 3]; 3],
    pub n: usize,
    pub include_diagonal: bool,
    pub permutations: usize,
    pub seed: u64,
}

impl CorrelationTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric_x,metric_y,r,p\n");
        for i in 0..3 {
            for j in 0..3 {
                out.push_str(&format!(
                    "{},{},{:.3},{:.4}\n",
                    self.metrics[i], self.metrics[j], self.r[i][j], self.p[i][j]
                ));
            }
        }
        out
    }

    pub fn get(&self, a: Metric, b: Metric) -> (f64, f64) {
        let i = Metric::ALL.iter().position(|&m| m == a).unwrap();
        let j = Metric::ALL.iter().position(|&m| m == b).unwrap();
        (self.r[i][j], self.p[i][j])
    }
}

/// Correlate every pair of metrics over the cells of `matrices`, which are
/// concatenated in order after row-major flattening.
pub fn metric_correlation(
    matrices: &[&CompatMatrix],
    include_diagonal: bool,
    permutations: usize,
    seed: u64,
) -> Result<CorrelationTable> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::validation("no matrices to correlate"))?;
    if let Some(m) = matrices.iter().find(|m| m.corpora != first.corpora) {
        return Err(Error::validation(format!(
            "matrix over {:?} does not match {:?}",
            m.corpora, first.corpora
        )));
    }
    let series: Vec<Vec<f64>> = Metric::ALL
        .iter()
        .map(|&metric| {
            matrices
                .iter()
                .flat_map(|m| m.flatten(metric, include_diagonal))
                .collect()
        })
        .collect();
    let mut r = [[0.0; 3]; 3];
    let mut p = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            // A constant series (or fewer than 3 cells) has no defined
            // correlation; report NaN rather than failing the whole table.
            let (rij, pij) = pearson_test(&series[i], &series[j], permutations, seed).unwrap_or((f64::NAN, f64::NAN));
            // r of a series with itself is 1 by definition.
            let rij = if i == j { 1.0 } else { rij };
            r[i][j] = rij;
            r[j][i] = rij;
            p[i][j] = pij;
            p[j][i] = pij;
        }
    }
    Ok(CorrelationTable {
        metrics: Metric::ALL,
        r,
        p,
        n: series[0].len(),
        include_diagonal,
        permutations,
        seed,
    })
}
