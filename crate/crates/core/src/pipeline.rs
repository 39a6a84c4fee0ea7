//! End-to-end feature extraction plus model fitting, packaged as a
//! [`Trainer`] for cross-corpus runs.

use std::sync::Arc;

use rayon::prelude::*;

use crate::compat::{Predictor, Trainer};
use crate::corpus::{stratified_fold_indices, Corpus, LabelScheme};
use crate::embeddings::{d_feature_names, embed_document, fuse, EmbeddingTable};
use crate::error::{Error, Result};
use crate::features::{l_feature_names, l_features, ColumnStats, FeatureConfig, FeatureKind, FeatureMatrix};
use crate::formulas::EasyWords;
use crate::models::{cross_validate_matrix, fit_matrix, CrossValidation, Model, ModelSpec};
use crate::textproc::TextAnalyzer;

/// Everything feature extraction needs besides the corpus.
#[derive(Debug, Clone)]
pub struct Resources {
    pub analyzer: TextAnalyzer,
    pub easy_words: EasyWords,
    pub embeddings: Option<Arc<EmbeddingTable>>,
    pub features: FeatureConfig,
}

impl Default for Resources {
    fn default() -> Self {
        Resources {
            analyzer: TextAnalyzer::default(),
            easy_words: EasyWords::embedded(),
            embeddings: None,
            features: FeatureConfig::default(),
        }
    }
}

impl Resources {
    fn table(&self, kind: FeatureKind) -> Result<Option<&EmbeddingTable>> {
        match (&self.embeddings, kind.needs_embeddings()) {
            (None, true) => Err(Error::validation(format!(
                "{kind} features need a word-embedding table"
            ))),
            (Some(t), true) => Ok(Some(t)),
            _ => Ok(None),
        }
    }
}

/// Features of one corpus.
#[derive(Debug, Clone)]
pub struct Extracted {
    pub matrix: FeatureMatrix,
    /// Statistics used to standardize the L block of fused features.
    pub l_stats: Option<ColumnStats>,
    /// Mean per-document share of out-of-vocabulary words.
    pub mean_oov: Option<f64>,
}

/// Extract `kind` features. For fused features the L block is standardized
/// with `l_stats` when given, else with this corpus's own statistics.
pub fn extract(
    corpus: &Corpus,
    kind: FeatureKind,
    res: &Resources,
    l_stats: Option<&ColumnStats>,
) -> Result<Extracted> {
    let table = res.table(kind)?;
    let per_doc = corpus
        .documents()
        .par_iter()
        .map(|doc| {
            let analysis = res.analyzer.analyze(&doc.text);
            let l = match kind {
                FeatureKind::D => None,
                _ => Some(
                    l_features(&analysis, &res.easy_words, &res.features)
                        .map_err(|e| e.context(format!("document {:?}", doc.id)))?,
                ),
            };
            let d = table.map(|t| embed_document(&analysis, t));
            Ok((l, d))
        })
        .collect::<Result<Vec<_>>>()?;

    let ids: Vec<String> = corpus.documents().iter().map(|d| d.id.clone()).collect();
    let mean_oov =
        table.map(|_| per_doc.iter().map(|(_, d)| d.as_ref().unwrap().oov_rate).sum::<f64>() / per_doc.len() as f64);
    let (names, rows, l_out) = match kind {
        FeatureKind::L => (
            l_feature_names(),
            per_doc.into_iter().map(|(l, _)| l.unwrap().values).collect(),
            None,
        ),
        FeatureKind::D => (
            d_feature_names(table.unwrap().dim()),
            per_doc.into_iter().map(|(_, d)| d.unwrap().vector.values).collect(),
            None,
        ),
        FeatureKind::All => {
            let stats = match l_stats {
                Some(s) => s.clone(),
                None => {
                    let l_rows: Vec<Vec<f64>> = per_doc
                        .iter()
                        .map(|(l, _)| l.as_ref().unwrap().values.clone())
                        .collect();
                    ColumnStats::from_rows(&l_rows)?
                }
            };
            let mut names = None;
            let rows = per_doc
                .into_iter()
                .map(|(l, d)| {
                    let v = fuse(&l.unwrap(), &d.unwrap().vector, &stats)?;
                    names.get_or_insert_with(|| v.names.clone());
                    Ok(v.values)
                })
                .collect::<Result<Vec<_>>>()?;
            (names.unwrap(), rows, Some(stats))
        }
    };
    Ok(Extracted {
        matrix: FeatureMatrix::new(kind, names, ids, corpus.labels(), rows)?,
        l_stats: l_out,
        mean_oov,
    })
}

/// A feature kind plus model spec, bound to its extraction resources.
#[derive(Debug, Clone)]
pub struct FeaturePipeline {
    pub spec: ModelSpec,
    pub resources: Arc<Resources>,
}

impl FeaturePipeline {
    pub fn new(spec: ModelSpec, resources: Arc<Resources>) -> Result<Self> {
        spec.validate()?;
        resources.table(spec.feature_kind)?;
        Ok(FeaturePipeline { spec, resources })
    }

    pub fn kind(&self) -> FeatureKind {
        self.spec.feature_kind
    }

    pub fn fit(&self, source: &Corpus) -> Result<TrainedPipeline> {
        let ex = extract(source, self.kind(), &self.resources, None)?;
        let mut model = fit_matrix(&ex.matrix, source.scheme(), &self.spec)?;
        model.fusion_stats = ex.l_stats;
        Ok(TrainedPipeline {
            model,
            resources: self.resources.clone(),
        })
    }

    /// Stratified k-fold cross-validation on one corpus.
    ///
    /// Features are extracted once for the whole corpus. Only fused features
    /// depend on corpus statistics, and [`crate::models::fit`] re-standardizes
    /// every column on the training fold, which cancels that dependence.
    pub fn cross_validate(&self, corpus: &Corpus, k: usize, seed: u64) -> Result<CrossValidation> {
        let folds = stratified_fold_indices(corpus, k, seed)?;
        let ex = extract(corpus, self.kind(), &self.resources, None)?;
        cross_validate_matrix(&ex.matrix, corpus.scheme(), &self.spec, &folds)
    }
}

impl Trainer for FeaturePipeline {
    type Predictor = TrainedPipeline;

    fn train(&self, source: &Corpus) -> Result<TrainedPipeline> {
        self.fit(source)
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "features": self.kind(),
            "model": self.spec,
            "long_sentence_threshold": self.resources.features.long_sentence_threshold,
        })
    }
}

/// A fitted model together with what is needed to featurize new corpora.
#[derive(Debug, Clone)]
pub struct TrainedPipeline {
    pub model: Model,
    pub resources: Arc<Resources>,
}

impl TrainedPipeline {
    pub fn features(&self, corpus: &Corpus) -> Result<Extracted> {
        extract(
            corpus,
            self.model.spec.feature_kind,
            &self.resources,
            self.model.fusion_stats.as_ref(),
        )
    }
}

impl Predictor for TrainedPipeline {
    fn scheme(&self) -> &LabelScheme {
        &self.model.scheme
    }

    fn predict_corpus(&self, target: &Corpus) -> Result<Vec<usize>> {
        let ex = self.features(target)?;
        self.model.predict_batch(&ex.matrix.rows)
    }
}
