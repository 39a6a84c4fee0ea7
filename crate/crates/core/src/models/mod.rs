//! Difficulty classifiers and their evaluation.
//!
//! A [`Model`] wraps one of the learners behind the [`Classifier`] trait,
//! together with the label scheme it predicts into and the column
//! statistics used to standardize its inputs.

mod eval;
pub mod gbdt;
mod persist;
pub mod softmax;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::LabelScheme;
use crate::error::{Error, Result};
use crate::features::{ColumnStats, FeatureKind, FeatureMatrix, FeatureVector};

pub use eval::{evaluate, ClassMetrics, EvalReport};
pub use gbdt::{GbdtModel, GbdtParams};
pub use persist::{load_model, MODEL_FORMAT_VERSION};
pub use softmax::{SoftmaxModel, SoftmaxParams};

/// Anything that maps a standardized feature row to one score per class.
pub trait Classifier {
    fn scores(&self, x: &[f64]) -> Vec<f64>;

    /// Highest-scoring class; ties go to the lowest index.
    fn predict_row(&self, x: &[f64]) -> usize {
        argmax(&self.scores(x))
    }
}

pub(crate) fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Learner {
    Softmax(SoftmaxParams),
    Gbdt(GbdtParams),
}

impl Learner {
    pub fn name(&self) -> &'static str {
        match self {
            Learner::Softmax(_) => "softmax",
            Learner::Gbdt(_) => "gbdt",
        }
    }
}

/// Learner names accepted on the command line, with default hyperparameters.
impl FromStr for Learner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "softmax" => Ok(Learner::Softmax(SoftmaxParams::default())),
            "gbdt" => Ok(Learner::Gbdt(GbdtParams::default())),
            _ => Err(Error::validation(format!(
                "unknown model {s:?} (expected softmax or gbdt)"
            ))),
        }
    }
}

impl fmt::Display for Learner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub learner: Learner,
    pub seed: u64,
    pub feature_kind: FeatureKind,
}

impl ModelSpec {
    pub fn new(learner: Learner, feature_kind: FeatureKind, seed: u64) -> Self {
        ModelSpec {
            learner,
            seed,
            feature_kind,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::validation(m));
        match &self.learner {
            Learner::Softmax(p) => {
                if p.epochs == 0 {
                    return bad("softmax epochs must be >= 1".into());
                }
                if !(p.learning_rate > 0.0 && p.learning_rate.is_finite()) {
                    return bad(format!("learning rate must be > 0, got {}", p.learning_rate));
                }
                if !(p.l2 >= 0.0 && p.l2.is_finite()) {
                    return bad(format!("L2 weight must be >= 0, got {}", p.l2));
                }
                if p.batch_size == 0 {
                    return bad("batch size must be >= 1".into());
                }
            }
            Learner::Gbdt(p) => {
                if p.trees == 0 {
                    return bad("gbdt trees must be >= 1".into());
                }
                if p.depth == 0 {
                    return bad("gbdt depth must be >= 1".into());
                }
                if !(p.shrinkage > 0.0 && p.shrinkage.is_finite()) {
                    return bad(format!("shrinkage must be > 0, got {}", p.shrinkage));
                }
                if p.max_bins < 2 || p.max_bins > usize::from(u16::MAX) {
                    return bad(format!("max bins must be in 2..=65535, got {}", p.max_bins));
                }
                if !(p.lambda >= 0.0 && p.lambda.is_finite()) {
                    return bad(format!("leaf lambda must be >= 0, got {}", p.lambda));
                }
                if !(p.min_child_weight >= 0.0 && p.min_child_weight.is_finite()) {
                    return bad(format!("min child weight must be >= 0, got {}", p.min_child_weight));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Softmax(SoftmaxModel),
    Gbdt(GbdtModel),
}

impl Params {
    fn classifier(&self) -> &dyn Classifier {
        match self {
            Params::Softmax(m) => m,
            Params::Gbdt(m) => m,
        }
    }
}

/// A trained classifier. Immutable once fitted.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub spec: ModelSpec,
    pub scheme: LabelScheme,
    pub feature_names: Arc<[String]>,
    pub standardizer: ColumnStats,
    /// For fused inputs, the statistics that standardized the L block when
    /// the training rows were built. New rows must be fused with these.
    pub fusion_stats: Option<ColumnStats>,
    pub params: Params,
}

/// Fit a model on raw (unstandardized) rows.
pub fn fit(
    rows: &[Vec<f64>],
    labels: &[usize],
    feature_names: Arc<[String]>,
    scheme: &LabelScheme,
    spec: &ModelSpec,
) -> Result<Model> {
    spec.validate()?;
    if rows.is_empty() {
        return Err(Error::validation("training set is empty"));
    }
    if rows.len() != labels.len() {
        return Err(Error::validation(format!(
            "{} feature rows but {} labels",
            rows.len(),
            labels.len()
        )));
    }
    let d = feature_names.len();
    if d == 0 {
        return Err(Error::validation("feature rows have no columns"));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != d {
            return Err(Error::validation(format!(
                "row {i} has {} features, expected {d}",
                row.len()
            )));
        }
        if let Some(j) = row.iter().position(|x| !x.is_finite()) {
            return Err(Error::validation(format!(
                "row {i}: non-finite value {} in feature {}",
                row[j], feature_names[j]
            )));
        }
    }
    for &y in labels {
        scheme.check_index(y)?;
    }
    let mut present = vec![false; scheme.len()];
    labels.iter().for_each(|&y| present[y] = true);
    if present.iter().filter(|&&p| p).count() < 2 {
        return Err(Error::validation(
            "training set contains a single class; at least 2 are required",
        ));
    }

    let standardizer = ColumnStats::from_rows(rows)?;
    let x: Vec<Vec<f64>> = rows.iter().map(|r| standardizer.standardize(r)).collect();
    let k = scheme.len();
    let params = match &spec.learner {
        Learner::Softmax(p) => Params::Softmax(softmax::fit_softmax(&x, labels, k, p, spec.seed)),
        Learner::Gbdt(p) => Params::Gbdt(gbdt::fit_gbdt(&x, labels, k, p).0),
    };
    Ok(Model {
        spec: *spec,
        scheme: scheme.clone(),
        feature_names,
        standardizer,
        fusion_stats: None,
        params,
    })
}

/// Fit on a feature matrix whose labels index into `scheme`.
pub fn fit_matrix(matrix: &FeatureMatrix, scheme: &LabelScheme, spec: &ModelSpec) -> Result<Model> {
    if matrix.kind != spec.feature_kind {
        return Err(Error::validation(format!(
            "model expects {} features but the matrix holds {}",
            spec.feature_kind, matrix.kind
        )));
    }
    fit(&matrix.rows, &matrix.labels, matrix.names.clone(), scheme, spec)
}

impl Model {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.scheme.len()
    }

    /// Per-class scores for one raw row.
    pub fn scores(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.n_features() {
            return Err(Error::validation(format!(
                "feature dimension mismatch: model expects {}, got {}",
                self.n_features(),
                row.len()
            )));
        }
        Ok(self.params.classifier().scores(&self.standardizer.standardize(row)))
    }

    pub fn predict_row(&self, row: &[f64]) -> Result<usize> {
        self.scores(row).map(|s| argmax(&s))
    }

    pub fn predict(&self, features: &FeatureVector) -> Result<usize> {
        if features.kind != self.spec.feature_kind {
            return Err(Error::validation(format!(
                "model expects {} features, got {}",
                self.spec.feature_kind, features.kind
            )));
        }
        self.predict_row(&features.values)
    }

    /// Predict many rows in parallel; output order matches input order.
    pub fn predict_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<usize>> {
        rows.par_iter().map(|r| self.predict_row(r)).collect()
    }
}

/// Mean of the fold reports' scalar metrics, with the folds retained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub folds: Vec<EvalReport>,
}

/// Fit and evaluate once per test split in `folds` (indices into `matrix`).
pub fn cross_validate_matrix(
    matrix: &FeatureMatrix,
    scheme: &LabelScheme,
    spec: &ModelSpec,
    folds: &[Vec<usize>],
) -> Result<CrossValidation> {
    if folds.is_empty() {
        return Err(Error::validation("no folds to cross-validate"));
    }
    let n = matrix.n_rows();
    let mut reports = Vec::with_capacity(folds.len());
    for (f, test) in folds.iter().enumerate() {
        let mut in_test = vec![false; n];
        for &i in test {
            if i >= n {
                return Err(Error::invariant(format!("fold index {i} out of range")));
            }
            in_test[i] = true;
        }
        let (mut tr_x, mut tr_y) = (Vec::new(), Vec::new());
        for i in (0..n).filter(|&i| !in_test[i]) {
            tr_x.push(matrix.rows[i].clone());
            tr_y.push(matrix.labels[i]);
        }
        let fold_spec = ModelSpec {
            seed: spec.seed.wrapping_add(f as u64),
            ..*spec
        };
        let model =
            fit(&tr_x, &tr_y, matrix.names.clone(), scheme, &fold_spec).map_err(|e| e.context(format!("fold {f}")))?;
        let test_x: Vec<Vec<f64>> = test.iter().map(|&i| matrix.rows[i].clone()).collect();
        let truth: Vec<usize> = test.iter().map(|&i| matrix.labels[i]).collect();
        let pred = model.predict_batch(&test_x)?;
        reports.push(evaluate(&pred, &truth, scheme.len())?);
    }
    let m = reports.len() as f64;
    let mean = |f: fn(&EvalReport) -> f64| reports.iter().map(f).sum::<f64>() / m;
    Ok(CrossValidation {
        accuracy: mean(|r| r.accuracy),
        precision: mean(|r| r.precision),
        recall: mean(|r| r.recall),
        f1: mean(|r| r.f1),
        folds: reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn names(d: usize) -> Arc<[String]> {
        (0..d).map(|i| format!("f{i}")).collect()
    }

    fn scheme(k: usize) -> LabelScheme {
        LabelScheme::numbered("t", k).unwrap()
    }

    fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
        // Box-Muller
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    fn clusters() -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..200 {
            let c = i % 2;
            let centre = if c == 0 { -3.0 } else { 3.0 };
            rows.push(vec![
                centre + gaussian(&mut rng) * 0.7,
                centre + gaussian(&mut rng) * 0.7,
            ]);
            labels.push(c);
        }
        (rows, labels)
    }

    fn xor() -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..400 {
            let x: f64 = rng.gen_range(-1.0..1.0);
            let y: f64 = rng.gen_range(-1.0..1.0);
            rows.push(vec![x, y]);
            labels.push(usize::from((x > 0.0) != (y > 0.0)));
        }
        (rows, labels)
    }

    fn train_accuracy(model: &Model, rows: &[Vec<f64>], labels: &[usize]) -> f64 {
        let pred = model.predict_batch(rows).unwrap();
        pred.iter().zip(labels).filter(|(p, t)| p == t).count() as f64 / labels.len() as f64
    }

    fn softmax_spec() -> ModelSpec {
        ModelSpec::new(Learner::Softmax(SoftmaxParams::default()), FeatureKind::L, 42)
    }

    fn gbdt_spec() -> ModelSpec {
        ModelSpec::new(Learner::Gbdt(GbdtParams::default()), FeatureKind::L, 42)
    }

    #[test]
    fn softmax_separates_clusters() {
        let (rows, labels) = clusters();
        let m = fit(&rows, &labels, names(2), &scheme(2), &softmax_spec()).unwrap();
        assert!(train_accuracy(&m, &rows, &labels) >= 0.95);
    }

    #[test]
    fn xor_needs_trees() {
        let (rows, labels) = xor();
        let s = fit(&rows, &labels, names(2), &scheme(2), &softmax_spec()).unwrap();
        assert!(train_accuracy(&s, &rows, &labels) <= 0.75);
        let g = fit(&rows, &labels, names(2), &scheme(2), &gbdt_spec()).unwrap();
        assert!(train_accuracy(&g, &rows, &labels) >= 0.95);
    }

    #[test]
    fn fit_is_deterministic() {
        let (rows, labels) = xor();
        for spec in [softmax_spec(), gbdt_spec()] {
            let a = fit(&rows, &labels, names(2), &scheme(2), &spec).unwrap();
            let b = fit(&rows, &labels, names(2), &scheme(2), &spec).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn memorizing_gbdt_recovers_training_labels() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rows: Vec<Vec<f64>> = (0..40).map(|_| vec![rng.gen(), rng.gen(), rng.gen()]).collect();
        let labels: Vec<usize> = (0..40).map(|_| rng.gen_range(0..3)).collect();
        let spec = ModelSpec::new(
            Learner::Gbdt(GbdtParams {
                trees: 100,
                depth: 8,
                shrinkage: 0.5,
                max_bins: 64,
                lambda: 1e-3,
                min_child_weight: 0.0,
            }),
            FeatureKind::L,
            1,
        );
        let m = fit(&rows, &labels, names(3), &scheme(3), &spec).unwrap();
        for (r, &y) in rows.iter().zip(&labels) {
            assert_eq!(m.predict_row(r).unwrap(), y);
        }
    }

    #[test]
    fn zero_weights_predict_level_zero() {
        let (rows, labels) = clusters();
        let mut m = fit(&rows, &labels, names(2), &scheme(2), &softmax_spec()).unwrap();
        if let Params::Softmax(s) = &mut m.params {
            s.weights.iter_mut().for_each(|w| *w = 0.0);
        }
        assert_eq!(m.predict_row(&[5.0, 5.0]).unwrap(), 0);
    }

    #[test]
    fn batch_preserves_order() {
        let (rows, labels) = clusters();
        let m = fit(&rows, &labels, names(2), &scheme(2), &softmax_spec()).unwrap();
        let batch = m.predict_batch(&rows).unwrap();
        let single: Vec<usize> = rows.iter().map(|r| m.predict_row(r).unwrap()).collect();
        assert_eq!(batch, single);
    }

    #[test]
    fn standardization_is_baked_in() {
        // Applying an affine map to the training columns and the query row
        // alike leaves predictions unchanged.
        let (rows, labels) = xor();
        let map = |r: &Vec<f64>| vec![r[0] * 7.0 + 100.0, r[1] * 0.01 - 3.0];
        let mapped: Vec<Vec<f64>> = rows.iter().map(map).collect();
        for spec in [softmax_spec(), gbdt_spec()] {
            let a = fit(&rows, &labels, names(2), &scheme(2), &spec).unwrap();
            let b = fit(&mapped, &labels, names(2), &scheme(2), &spec).unwrap();
            for (r, mr) in rows.iter().zip(&mapped).take(100) {
                assert_eq!(a.predict_row(r).unwrap(), b.predict_row(mr).unwrap());
            }
        }
    }

    #[test]
    fn fit_rejects_bad_input() {
        let rows = vec![vec![1.0], vec![2.0]];
        let err = fit(&rows, &[1, 1], names(1), &scheme(2), &softmax_spec()).unwrap_err();
        assert!(err.to_string().contains("single class"));
        let rows = vec![vec![1.0], vec![f64::NAN]];
        let err = fit(&rows, &[0, 1], names(1), &scheme(2), &softmax_spec()).unwrap_err();
        assert!(err.to_string().contains("row 1"), "{err}");
        let mut spec = softmax_spec();
        spec.learner = Learner::Softmax(SoftmaxParams {
            epochs: 0,
            ..SoftmaxParams::default()
        });
        assert!(fit(&[vec![0.0], vec![1.0]], &[0, 1], names(1), &scheme(2), &spec).is_err());
    }

    #[test]
    fn predict_checks_dimension_and_kind() {
        let (rows, labels) = clusters();
        let m = fit(&rows, &labels, names(2), &scheme(2), &softmax_spec()).unwrap();
        assert!(m.predict_row(&[1.0]).is_err());
        let v = FeatureVector {
            kind: FeatureKind::D,
            values: vec![0.0, 0.0],
            names: names(2),
        };
        assert!(m.predict(&v).is_err());
    }

    #[test]
    fn learner_from_str() {
        assert_eq!("GBDT".parse::<Learner>().unwrap().name(), "gbdt");
        assert!("svm".parse::<Learner>().is_err());
    }
}
