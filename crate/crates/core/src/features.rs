//! The 21 linguistic features ("L-features") and feature matrices.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::formulas::{csv_field, EasyWords, COMPLEX_SYLLABLES, LONG_WORD_LETTERS};
use crate::textproc::{is_wh_subordinator, DocAnalysis, PhraseKind, Tag, TextAnalyzer};

/// Feature codes in vector order.
pub const L_FEATURE_NAMES: [&str; 21] = [
    "ASPW", "ALPW", "DWP", "CWP", "LWP", "LSP", "AWPS", "NPS", "VPS", "PPS", "SPS", "SQS", "ANPS", "AVPS", "APPS",
    "APT", "NP", "PNP", "PP", "CoP", "CP",
];

pub const L_FEATURE_COUNT: usize = L_FEATURE_NAMES.len();

/// Indices of features that are fractions in `[0, 1]`.
pub const FRACTION_FEATURES: [usize; 9] = [2, 3, 4, 5, 16, 17, 18, 19, 20];

pub const DEFAULT_LONG_SENTENCE_THRESHOLD: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureKind {
    L,
    D,
    #[serde(rename = "ALL")]
    All,
}

impl FeatureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::L => "L",
            FeatureKind::D => "D",
            FeatureKind::All => "ALL",
        }
    }

    pub fn needs_embeddings(self) -> bool {
        matches!(self, FeatureKind::D | FeatureKind::All)
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "L" => Ok(FeatureKind::L),
            "D" => Ok(FeatureKind::D),
            "ALL" => Ok(FeatureKind::All),
            _ => Err(Error::validation(format!(
                "unknown feature kind {s:?} (expected L, D or ALL)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub kind: FeatureKind,
    pub values: Vec<f64>,
    pub names: Arc<[String]>,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, code: &str) -> Option<f64> {
        self.names.iter().position(|n| n == code).map(|i| self.values[i])
    }
}

pub fn l_feature_names() -> Arc<[String]> {
    L_FEATURE_NAMES.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    /// Sentences with more words than this count as long.
    pub long_sentence_threshold: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            long_sentence_threshold: DEFAULT_LONG_SENTENCE_THRESHOLD,
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Compute the 21 L-features.
///
/// Lexical features average over word tokens, syntactic features over
/// sentences (phrase lengths in tokens), grammatical features over all
/// tokens. Averages with an empty denominator are 0. `APT` has no real
/// parse tree to measure and is approximated as phrases per sentence
/// plus one.
pub fn l_features(analysis: &DocAnalysis, easy_words: &EasyWords, config: &FeatureConfig) -> Result<FeatureVector> {
    let sentences = analysis.sentence_count();
    let words = analysis.word_count();
    if sentences == 0 || words == 0 {
        return Err(Error::validation("document has no sentences with words"));
    }
    let tokens = analysis.token_count();

    let (mut syllables, mut letters, mut difficult, mut complex, mut long) = (0, 0, 0, 0, 0);
    for (token, syl) in analysis.words() {
        syllables += syl;
        letters += token.letters;
        difficult += usize::from(!easy_words.contains(&token.surface));
        complex += usize::from(syl >= COMPLEX_SYLLABLES);
        long += usize::from(token.letters > LONG_WORD_LETTERS);
    }

    let mut long_sentences = 0;
    let mut phrase_count = [0usize; 3];
    let mut phrase_tokens = [0usize; 3];
    let mut sconj = 0;
    let mut wh = 0;
    let mut tag_counts = [0usize; Tag::ALL.len()];
    let mut commas = 0;
    for s in &analysis.sentences {
        long_sentences += usize::from(s.word_count() > config.long_sentence_threshold);
        for p in &s.phrases {
            let k = match p.kind {
                PhraseKind::NP => 0,
                PhraseKind::VP => 1,
                PhraseKind::PP => 2,
            };
            phrase_count[k] += 1;
            phrase_tokens[k] += p.len();
        }
        for t in &s.tokens {
            tag_counts[t.tag as usize] += 1;
            if t.tag == Tag::Sconj {
                sconj += 1;
            }
            if t.token.is_word && is_wh_subordinator(&t.token.surface) {
                wh += 1;
            }
            if t.token.surface == "," {
                commas += 1;
            }
        }
    }
    let all_phrases: usize = phrase_count.iter().sum();
    let tag = |t: Tag| tag_counts[t as usize];

    let values = vec![
        ratio(syllables, words),
        ratio(letters, words),
        ratio(difficult, words),
        ratio(complex, words),
        ratio(long, words),
        ratio(long_sentences, sentences),
        ratio(words, sentences),
        ratio(phrase_count[0], sentences),
        ratio(phrase_count[1], sentences),
        ratio(phrase_count[2], sentences),
        ratio(sconj, sentences),
        ratio(wh, sentences),
        ratio(phrase_tokens[0], phrase_count[0]),
        ratio(phrase_tokens[1], phrase_count[1]),
        ratio(phrase_tokens[2], phrase_count[2]),
        ratio(all_phrases, sentences) + 1.0,
        ratio(tag(Tag::Noun), tokens),
        ratio(tag(Tag::Propn), tokens),
        ratio(tag(Tag::Pron), tokens),
        ratio(tag(Tag::Conj) + tag(Tag::Sconj), tokens),
        ratio(commas, tokens),
    ];
    debug_assert_eq!(values.len(), L_FEATURE_COUNT);
    Ok(FeatureVector {
        kind: FeatureKind::L,
        values,
        names: l_feature_names(),
    })
}

/// Per-column mean and population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl ColumnStats {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::validation("cannot compute column statistics of zero rows"))?;
        let d = first.len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for row in rows {
            if row.len() != d {
                return Err(Error::validation(format!(
                    "ragged feature rows: {} vs {d} columns",
                    row.len()
                )));
            }
            for (m, x) in mean.iter_mut().zip(row) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for row in rows {
            for ((v, x), m) in var.iter_mut().zip(row).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        let std = var.into_iter().map(|v| (v / n).sqrt()).collect();
        Ok(ColumnStats { mean, std })
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    /// `(x - mean) / std` per column, with zero-variance columns mapped to 0.
    pub fn standardize(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(x, (m, s))| if *s > 0.0 { (x - m) / s } else { 0.0 })
            .collect()
    }
}

/// Feature rows for a corpus, in document order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub kind: FeatureKind,
    pub names: Arc<[String]>,
    pub ids: Vec<String>,
    pub labels: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
    pub stats: ColumnStats,
}

impl FeatureMatrix {
    pub fn new(
        kind: FeatureKind,
        names: Arc<[String]>,
        ids: Vec<String>,
        labels: Vec<usize>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if ids.len() != rows.len() || labels.len() != rows.len() {
            return Err(Error::invariant("feature matrix ids, labels and rows differ in length"));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != names.len()) {
            return Err(Error::invariant(format!(
                "feature row has {} values for {} names",
                r.len(),
                names.len()
            )));
        }
        let stats = ColumnStats::from_rows(&rows)?;
        Ok(FeatureMatrix {
            kind,
            names,
            ids,
            labels,
            rows,
            stats,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn row(&self, i: usize) -> FeatureVector {
        FeatureVector {
            kind: self.kind,
            values: self.rows[i].clone(),
            names: self.names.clone(),
        }
    }

    pub fn to_csv(&self, level_names: &[String]) -> String {
        let mut out = String::from("id,level");
        for n in self.names.iter() {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for ((id, &label), row) in self.ids.iter().zip(&self.labels).zip(&self.rows) {
            out.push_str(&csv_field(id));
            out.push(',');
            out.push_str(&csv_field(&level_names[label]));
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// L-feature matrix for a corpus. Any document without analyzable
/// sentences is an error that names it.
pub fn feature_matrix(
    corpus: &Corpus,
    analyzer: &TextAnalyzer,
    easy_words: &EasyWords,
    config: &FeatureConfig,
) -> Result<FeatureMatrix> {
    let rows = corpus
        .documents()
        .par_iter()
        .map(|doc| {
            let analysis = analyzer.analyze(&doc.text);
            l_features(&analysis, easy_words, config)
                .map(|v| v.values)
                .map_err(|e| e.context(format!("document {:?}", doc.id)))
        })
        .collect::<Result<Vec<_>>>()?;
    FeatureMatrix::new(
        FeatureKind::L,
        l_feature_names(),
        corpus.documents().iter().map(|d| d.id.clone()).collect(),
        corpus.labels(),
        rows,
    )
}
