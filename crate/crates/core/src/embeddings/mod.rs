//! Word-embedding ("D") features: GloVe-format tables, a small
//! co-occurrence trainer, mean pooling, and fusion with L-features.

mod glove;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

pub use glove::{train_cooc, train_toy_embedder, CoocMatrix, GloveConfig, TrainReport};

use crate::error::{Error, Result};
use crate::features::{ColumnStats, FeatureKind, FeatureVector, L_FEATURE_COUNT};
use crate::textproc::DocAnalysis;

/// Word vectors of a fixed dimension, keyed by lowercase word.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    words: Vec<String>,
    vectors: Vec<f64>,
    index: HashMap<String, usize>,
    /// Lines whose word had already been seen while loading.
    duplicates: usize,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("embedding dimension must be >= 1"));
        }
        Ok(EmbeddingTable {
            dim,
            words: Vec::new(),
            vectors: Vec::new(),
            index: HashMap::new(),
            duplicates: 0,
        })
    }

    /// Insert or replace a word's vector. Returns true if the word was new.
    pub fn insert(&mut self, word: &str, vector: &[f64]) -> Result<bool> {
        if vector.len() != self.dim {
            return Err(Error::validation(format!(
                "vector for {word:?} has {} values, table dimension is {}",
                vector.len(),
                self.dim
            )));
        }
        let key = word.to_lowercase();
        match self.index.get(&key) {
            Some(&i) => {
                self.vectors[i * self.dim..(i + 1) * self.dim].copy_from_slice(vector);
                self.duplicates += 1;
                Ok(false)
            }
            None => {
                self.index.insert(key.clone(), self.words.len());
                self.words.push(key);
                self.vectors.extend_from_slice(vector);
                Ok(true)
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        let i = match self.index.get(word) {
            Some(&i) => i,
            None => *self.index.get(&word.to_lowercase())?,
        };
        Some(&self.vectors[i * self.dim..(i + 1) * self.dim])
    }

    /// Parse the GloVe text format: `word v1 ... vd` per line, no header.
    /// A repeated word keeps its last vector.
    pub fn parse(src: &str) -> Result<Self> {
        let mut table: Option<EmbeddingTable> = None;
        let mut values = Vec::new();
        for (i, line) in src.lines().enumerate() {
            let lineno = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(' ').filter(|p| !p.is_empty());
            let word = parts.next().unwrap_or_default();
            values.clear();
            for p in parts {
                values.push(
                    p.parse::<f64>()
                        .map_err(|_| Error::validation(format!("embeddings line {lineno}: bad number {p:?}")))?,
                );
            }
            let t = match &mut table {
                Some(t) => t,
                None => table.insert(
                    EmbeddingTable::new(values.len()).map_err(|e| e.context(format!("embeddings line {lineno}")))?,
                ),
            };
            if values.len() != t.dim {
                return Err(Error::validation(format!(
                    "embeddings line {lineno}: expected {} values, found {}",
                    t.dim,
                    values.len()
                )));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::validation(format!("embeddings line {lineno}: non-finite value")));
            }
            t.insert(word, &values)?;
        }
        table.ok_or_else(|| Error::validation("embeddings file is empty"))
    }

    pub fn to_glove_string(&self) -> String {
        let mut out = String::new();
        for (i, w) in self.words.iter().enumerate() {
            out.push_str(w);
            for v in &self.vectors[i * self.dim..(i + 1) * self.dim] {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_glove_string()).map_err(|e| Error::io(path, e))
    }
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingTable> {
    let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    EmbeddingTable::parse(&src).map_err(|e| e.context(path.display()))
}

/// Pooled document vector plus the share of word tokens missing from the table.
#[derive(Debug, Clone, PartialEq)]
pub struct DocEmbedding {
    pub vector: FeatureVector,
    pub oov_rate: f64,
}

pub fn d_feature_names(dim: usize) -> Arc<[String]> {
    (0..dim).map(|i| format!("D{i}")).collect()
}

/// Mean of the vectors of in-vocabulary word tokens; the zero vector if none.
pub fn embed_document(analysis: &DocAnalysis, table: &EmbeddingTable) -> DocEmbedding {
    let mut sum = vec![0.0; table.dim()];
    let (mut found, mut total) = (0usize, 0usize);
    for (token, _) in analysis.words() {
        total += 1;
        if let Some(v) = table.get(&token.surface) {
            found += 1;
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
        }
    }
    if found > 0 {
        sum.iter_mut().for_each(|s| *s /= found as f64);
    }
    DocEmbedding {
        vector: FeatureVector {
            kind: FeatureKind::D,
            values: sum,
            names: d_feature_names(table.dim()),
        },
        oov_rate: if total == 0 {
            1.0
        } else {
            (total - found) as f64 / total as f64
        },
    }
}

/// Standardize the L entries with `l_stats` and append the D entries.
pub fn fuse(l: &FeatureVector, d: &FeatureVector, l_stats: &ColumnStats) -> Result<FeatureVector> {
    if l.kind != FeatureKind::L || d.kind != FeatureKind::D {
        return Err(Error::validation(format!(
            "fuse expects L and D vectors, got {} and {}",
            l.kind, d.kind
        )));
    }
    if l.len() != L_FEATURE_COUNT || l_stats.len() != L_FEATURE_COUNT {
        return Err(Error::validation(format!(
            "fuse expects {L_FEATURE_COUNT} L-features and statistics, got {} and {}",
            l.len(),
            l_stats.len()
        )));
    }
    let mut values = l_stats.standardize(&l.values);
    values.extend_from_slice(&d.values);
    let names: Arc<[String]> = l.names.iter().chain(d.names.iter()).cloned().collect();
    Ok(FeatureVector {
        kind: FeatureKind::All,
        values,
        names,
    })
}
