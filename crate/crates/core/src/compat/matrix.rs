//! Cross-corpus compatibility cells and matrices.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{label_histogram, ndcg, normalize_level, relevance_in_predicted_order, rjsd, rrnss, to_ranks};
use crate::corpus::{Corpus, LabelScheme};
use crate::error::{Error, Result};
use crate::formulas::csv_field;

/// Builds a predictor from a source corpus.
pub trait Trainer: Sync {
    type Predictor: Predictor + Send + Sync;

    fn train(&self, source: &Corpus) -> Result<Self::Predictor>;

    /// Machine-readable description stored alongside results.
    fn describe(&self) -> serde_json::Value {
        serde_json::Value::Null
    }
}

/// Assigns every document of a corpus a level of the predictor's own scheme.
pub trait Predictor {
    fn scheme(&self) -> &LabelScheme;

    fn predict_corpus(&self, target: &Corpus) -> Result<Vec<usize>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Rjsd,
    Rrnss,
    Ndcg,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Rjsd, Metric::Rrnss, Metric::Ndcg];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Rjsd => "RJSD",
            Metric::Rrnss => "RRNSS",
            Metric::Ndcg => "NDCG",
        }
    }

    /// Lowercase form used in file names.
    pub fn slug(self) -> &'static str {
        match self {
            Metric::Rjsd => "rjsd",
            Metric::Rrnss => "rrnss",
            Metric::Ndcg => "ndcg",
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompatCell {
    pub source: String,
    pub target: String,
    pub rjsd: f64,
    pub rrnss: f64,
    pub ndcg: f64,
    pub n: usize,
}

impl CompatCell {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Rjsd => self.rjsd,
            Metric::Rrnss => self.rrnss,
            Metric::Ndcg => self.ndcg,
        }
    }
}

/// Score predictions (indices into `source_scheme`) against `target`'s labels.
pub fn score_cell(
    source_id: &str,
    source_scheme: &LabelScheme,
    target: &Corpus,
    predictions: &[usize],
    bins: usize,
) -> Result<CompatCell> {
    if target.is_empty() {
        return Err(Error::validation("target corpus is empty"));
    }
    if predictions.len() != target.len() {
        return Err(Error::invariant(format!(
            "{} predictions for {} target documents",
            predictions.len(),
            target.len()
        )));
    }
    let truth_levels = target.labels();
    let truth = truth_levels
        .iter()
        .map(|&l| normalize_level(target.scheme(), l))
        .collect::<Result<Vec<f64>>>()?;
    let pred = predictions
        .iter()
        .map(|&p| normalize_level(source_scheme, p))
        .collect::<Result<Vec<f64>>>()?;
    let rjsd = rjsd(&label_histogram(&truth, bins)?, &label_histogram(&pred, bins)?)?;
    let rrnss = rrnss(&to_ranks(&truth), &to_ranks(&pred))?;
    let ndcg = ndcg(&relevance_in_predicted_order(&pred, &truth_levels))?;
    Ok(CompatCell {
        source: source_id.to_string(),
        target: target.id().to_string(),
        rjsd,
        rrnss,
        ndcg,
        n: target.len(),
    })
}

/// Fit on all of `source`, predict all of `target`, and score the agreement.
pub fn compat_cell<T: Trainer>(source: &Corpus, target: &Corpus, trainer: &T, bins: usize) -> Result<CompatCell> {
    let predictor = trainer.train(source)?;
    predict_and_score(source.id(), &predictor, target, bins)
}

fn predict_and_score<P: Predictor>(source_id: &str, predictor: &P, target: &Corpus, bins: usize) -> Result<CompatCell> {
    let pred = predictor.predict_corpus(target)?;
    score_cell(source_id, predictor.scheme(), target, &pred, bins)
}

/// Cells for every ordered (target, source) pair, stored row-major with
/// targets as rows and sources as columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompatMatrix {
    pub corpora: Vec<String>,
    pub bins: usize,
    pub pipeline: serde_json::Value,
    pub cells: Vec<CompatCell>,
}

impl CompatMatrix {
    pub fn size(&self) -> usize {
        self.corpora.len()
    }

    pub fn cell(&self, target: usize, source: usize) -> &CompatCell {
        &self.cells[target * self.size() + source]
    }

    pub fn values(&self, metric: Metric) -> Vec<Vec<f64>> {
        (0..self.size())
            .map(|t| (0..self.size()).map(|s| self.cell(t, s).get(metric)).collect())
            .collect()
    }

    /// Row-major values, optionally skipping source = target cells.
    pub fn flatten(&self, metric: Metric, include_diagonal: bool) -> Vec<f64> {
        let n = self.size();
        (0..n * n)
            .filter(|i| include_diagonal || i / n != i % n)
            .map(|i| self.cells[i].get(metric))
            .collect()
    }

    /// Rows are targets, columns sources, values to 3 decimals.
    pub fn to_csv(&self, metric: Metric) -> String {
        let mut out = String::from("target\\source");
        for id in &self.corpora {
            out.push(',');
            out.push_str(&csv_field(id));
        }
        out.push('\n');
        for (t, id) in self.corpora.iter().enumerate() {
            out.push_str(&csv_field(id));
            for s in 0..self.size() {
                write!(out, ",{:.3}", self.cell(t, s).get(metric)).unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Nested report: target -> source -> metrics, full precision.
    pub fn to_report(&self) -> serde_json::Value {
        let mut targets = serde_json::Map::new();
        for (t, tid) in self.corpora.iter().enumerate() {
            let mut sources = serde_json::Map::new();
            for (s, sid) in self.corpora.iter().enumerate() {
                let c = self.cell(t, s);
                sources.insert(
                    sid.clone(),
                    serde_json::json!({ "rjsd": c.rjsd, "rrnss": c.rrnss, "ndcg": c.ndcg, "n": c.n }),
                );
            }
            targets.insert(tid.clone(), serde_json::Value::Object(sources));
        }
        serde_json::json!({
            "corpora": self.corpora,
            "bins": self.bins,
            "pipeline": self.pipeline,
            "targets": targets,
        })
    }
}

impl CompatMatrix {
    /// Rebuild a matrix from the output of [`CompatMatrix::to_report`].
    pub fn from_report(report: &serde_json::Value) -> Result<CompatMatrix> {
        let bad = |m: &str| Error::validation(format!("malformed compatibility report: {m}"));
        let corpora: Vec<String> =
            serde_json::from_value(report["corpora"].clone()).map_err(|e| bad(&format!("corpora: {e}")))?;
        let bins = report["bins"].as_u64().ok_or_else(|| bad("missing bins"))? as usize;
        let targets = report["targets"].as_object().ok_or_else(|| bad("missing targets"))?;
        let mut cells = Vec::with_capacity(corpora.len() * corpora.len());
        for t in &corpora {
            let row = targets.get(t).ok_or_else(|| bad(&format!("no row for target {t:?}")))?;
            for s in &corpora {
                let c = &row[s.as_str()];
                let num = |k: &str| {
                    c[k].as_f64()
                        .ok_or_else(|| bad(&format!("cell ({t:?}, {s:?}) lacks {k}")))
                };
                cells.push(CompatCell {
                    source: s.clone(),
                    target: t.clone(),
                    rjsd: num("rjsd")?,
                    rrnss: num("rrnss")?,
                    ndcg: num("ndcg")?,
                    n: c["n"].as_u64().ok_or_else(|| bad("cell lacks n"))? as usize,
                });
            }
        }
        Ok(CompatMatrix {
            corpora,
            bins,
            pipeline: report["pipeline"].clone(),
            cells,
        })
    }
}

/// Train once per source and score every target against it. Cells are
/// computed in parallel; each depends only on its own (source, target)
/// pair, so the result equals a serial run.
pub fn compat_matrix<T: Trainer>(corpora: &[Corpus], trainer: &T, bins: usize) -> Result<CompatMatrix> {
    if corpora.len() < 2 {
        return Err(Error::validation(format!(
            "a compatibility matrix needs >= 2 corpora, got {}",
            corpora.len()
        )));
    }
    let mut seen = std::collections::HashSet::new();
    for c in corpora {
        if !seen.insert(c.id()) {
            return Err(Error::validation(format!("duplicate corpus id {:?}", c.id())));
        }
    }
    let predictors = corpora
        .par_iter()
        .map(|s| {
            trainer
                .train(s)
                .map_err(|e| e.context(format!("training on source {:?}", s.id())))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = corpora.len();
    let cells = (0..n * n)
        .into_par_iter()
        .map(|i| {
            let (t, s) = (i / n, i % n);
            predict_and_score(corpora[s].id(), &predictors[s], &corpora[t], bins)
                .map_err(|e| e.context(format!("source {:?}, target {:?}", corpora[s].id(), corpora[t].id())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CompatMatrix {
        corpora: corpora.iter().map(|c| c.id().to_string()).collect(),
        bins,
        pipeline: trainer.describe(),
        cells,
    })
}
