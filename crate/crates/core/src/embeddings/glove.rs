//! Toy co-occurrence factorization trainer (GloVe objective, AdaGrad updates).

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EmbeddingTable;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::textproc::TextAnalyzer;

/// Symmetric co-occurrence counts, weighted by `1 / distance` inside a window.
#[derive(Debug, Clone, PartialEq)]
pub struct CoocMatrix {
    vocab: Vec<String>,
    index: HashMap<String, u32>,
    counts: BTreeMap<(u32, u32), f64>,
}

impl CoocMatrix {
    /// Vocabulary ids follow first occurrence.
    pub fn from_sentences<S: AsRef<str>>(sentences: &[Vec<S>], window: usize) -> Self {
        let mut vocab = Vec::new();
        let mut index = HashMap::new();
        let mut counts = BTreeMap::new();
        for sentence in sentences {
            let ids: Vec<u32> = sentence
                .iter()
                .map(|w| {
                    let w = w.as_ref();
                    *index.entry(w.to_string()).or_insert_with(|| {
                        vocab.push(w.to_string());
                        (vocab.len() - 1) as u32
                    })
                })
                .collect();
            for (p, &a) in ids.iter().enumerate() {
                for (dist, &b) in ids.iter().enumerate().skip(p + 1).take(window) {
                    let w = 1.0 / (dist - p) as f64;
                    *counts.entry((a, b)).or_insert(0.0) += w;
                    *counts.entry((b, a)).or_insert(0.0) += w;
                }
            }
        }
        CoocMatrix { vocab, index, counts }
    }

    /// Lowercased word tokens of every sentence in the corpus, in order.
    pub fn build(corpus: &Corpus, analyzer: &TextAnalyzer, window: usize) -> Self {
        Self::build_all([corpus], analyzer, window)
    }

    /// [`CoocMatrix::build`] over several corpora, in the given order.
    pub fn build_all<'a>(
        corpora: impl IntoIterator<Item = &'a Corpus>,
        analyzer: &TextAnalyzer,
        window: usize,
    ) -> Self {
        let sentences: Vec<Vec<String>> = corpora
            .into_iter()
            .flat_map(|c| c.documents())
            .flat_map(|d| analyzer.analyze(&d.text).sentences)
            .map(|s| {
                s.tokens
                    .iter()
                    .filter(|t| t.token.is_word)
                    .map(|t| t.token.surface.to_lowercase())
                    .collect()
            })
            .collect();
        Self::from_sentences(&sentences, window)
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn get(&self, i: u32, j: u32) -> f64 {
        self.counts.get(&(i, j)).copied().unwrap_or(0.0)
    }

    /// Nonzero entries in `(row, col)` order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.counts.iter().map(|(&(i, j), &x)| (i, j, x))
    }

    pub fn nnz(&self) -> usize {
        self.counts.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GloveConfig {
    pub dim: usize,
    pub window: usize,
    pub x_max: f64,
    pub alpha: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for GloveConfig {
    fn default() -> Self {
        GloveConfig {
            dim: 50,
            window: 10,
            x_max: 100.0,
            alpha: 0.75,
            epochs: 25,
            learning_rate: 0.05,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainReport {
    /// Objective before training, then after each epoch.
    pub objective: Vec<f64>,
}

struct Params {
    dim: usize,
    // Rows 0..V are word vectors, V..2V context vectors.
    vecs: Vec<f64>,
    bias: Vec<f64>,
    grad_sq: Vec<f64>,
    bias_grad_sq: Vec<f64>,
}

impl Params {
    fn row(&self, r: usize) -> &[f64] {
        &self.vecs[r * self.dim..(r + 1) * self.dim]
    }

    fn residual(&self, v: usize, i: usize, j: usize, x: f64) -> f64 {
        let (w, c) = (self.row(i), self.row(v + j));
        let dot: f64 = w.iter().zip(c).map(|(a, b)| a * b).sum();
        dot + self.bias[i] + self.bias[v + j] - x.ln()
    }
}

fn weight(x: f64, x_max: f64, alpha: f64) -> f64 {
    if x < x_max {
        (x / x_max).powf(alpha)
    } else {
        1.0
    }
}

fn objective(p: &Params, cooc: &CoocMatrix, cfg: &GloveConfig) -> f64 {
    let v = cooc.vocab.len();
    cooc.entries()
        .map(|(i, j, x)| {
            let r = p.residual(v, i as usize, j as usize, x);
            weight(x, cfg.x_max, cfg.alpha) * r * r
        })
        .sum()
}

/// Fit word vectors to a co-occurrence matrix; each word's final vector is
/// the sum of its word and context vectors.
pub fn train_cooc(cooc: &CoocMatrix, cfg: &GloveConfig) -> Result<(EmbeddingTable, TrainReport)> {
    if cfg.dim < 2 {
        return Err(Error::validation(format!(
            "embedding dimension must be >= 2, got {}",
            cfg.dim
        )));
    }
    if cooc.vocab.len() < 2 || cooc.nnz() == 0 {
        return Err(Error::validation(format!(
            "degenerate vocabulary: {} words, {} co-occurrences",
            cooc.vocab.len(),
            cooc.nnz()
        )));
    }
    if !(cfg.learning_rate > 0.0 && cfg.x_max > 0.0) || cfg.epochs == 0 {
        return Err(Error::validation("learning rate and x_max must be > 0, epochs >= 1"));
    }
    let v = cooc.vocab.len();
    let d = cfg.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut p = Params {
        dim: d,
        vecs: (0..2 * v * d).map(|_| (rng.gen::<f64>() - 0.5) / d as f64).collect(),
        bias: vec![0.0; 2 * v],
        grad_sq: vec![1.0; 2 * v * d],
        bias_grad_sq: vec![1.0; 2 * v],
    };
    let mut entries: Vec<(u32, u32, f64)> = cooc.entries().collect();
    let mut report = TrainReport {
        objective: vec![objective(&p, cooc, cfg)],
    };
    let lr = cfg.learning_rate;
    for _ in 0..cfg.epochs {
        entries.shuffle(&mut rng);
        for &(i, j, x) in &entries {
            let (wi, cj) = (i as usize, v + j as usize);
            let fdiff = weight(x, cfg.x_max, cfg.alpha) * p.residual(v, wi, j as usize, x);
            for k in 0..d {
                let (a, b) = (wi * d + k, cj * d + k);
                let gw = fdiff * p.vecs[b];
                let gc = fdiff * p.vecs[a];
                p.vecs[a] -= lr * gw / p.grad_sq[a].sqrt();
                p.vecs[b] -= lr * gc / p.grad_sq[b].sqrt();
                p.grad_sq[a] += gw * gw;
                p.grad_sq[b] += gc * gc;
            }
            p.bias[wi] -= lr * fdiff / p.bias_grad_sq[wi].sqrt();
            p.bias[cj] -= lr * fdiff / p.bias_grad_sq[cj].sqrt();
            p.bias_grad_sq[wi] += fdiff * fdiff;
            p.bias_grad_sq[cj] += fdiff * fdiff;
        }
        report.objective.push(objective(&p, cooc, cfg));
    }
    let mut table = EmbeddingTable::new(d)?;
    let mut buf = vec![0.0; d];
    for (i, word) in cooc.vocab.iter().enumerate() {
        for (k, b) in buf.iter_mut().enumerate() {
            *b = p.vecs[i * d + k] + p.vecs[(v + i) * d + k];
        }
        table.insert(word, &buf)?;
    }
    Ok((table, report))
}

/// Build the co-occurrence matrix of `corpus` and train on it.
pub fn train_toy_embedder(
    corpus: &Corpus,
    analyzer: &TextAnalyzer,
    cfg: &GloveConfig,
) -> Result<(EmbeddingTable, TrainReport)> {
    let cooc = CoocMatrix::build(corpus, analyzer, cfg.window);
    train_cooc(&cooc, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, LabelScheme};
    use proptest::prelude::*;

    fn words(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn window_weights() {
        let m = CoocMatrix::from_sentences(&[words("a b c a")], 2);
        let (a, b, c) = (m.id("a").unwrap(), m.id("b").unwrap(), m.id("c").unwrap());
        assert_eq!(m.get(a, b), 1.0 + 0.5);
        assert_eq!(m.get(a, c), 0.5 + 1.0);
        assert_eq!(m.get(b, c), 1.0);
        // The two `a`s are 3 apart, outside the window.
        assert_eq!(m.get(a, a), 0.0);
        let wide = CoocMatrix::from_sentences(&[words("a b c a")], 3);
        assert!(wide.get(a, a) > 0.0);
    }

    proptest! {
        #[test]
        fn cooc_is_symmetric(
            sentences in proptest::collection::vec(proptest::collection::vec("[a-e]", 1..12), 1..6),
            window in 1usize..5,
        ) {
            let m = CoocMatrix::from_sentences(&sentences, window);
            for (i, j, x) in m.entries() {
                prop_assert!(x > 0.0);
                prop_assert_eq!(m.get(j, i), x);
            }
        }
    }

    fn toy_corpus(lines: &[String]) -> Corpus {
        let docs = lines
            .iter()
            .enumerate()
            .map(|(i, t)| Document {
                id: format!("d{i}"),
                text: t.clone(),
                level: i % 2,
            })
            .collect();
        Corpus::new("toy", LabelScheme::numbered("s", 2).unwrap(), docs).unwrap()
    }

    fn sentences_200() -> Vec<String> {
        let subjects = ["the cat", "a dog", "the bird", "my friend", "the teacher"];
        let verbs = ["sees", "likes", "finds", "follows"];
        let objects = ["the ball", "a tree", "the river", "some bread", "the house"];
        (0..200)
            .map(|i| {
                format!(
                    "{} {} {} near {}.",
                    subjects[i % 5],
                    verbs[(i / 5) % 4],
                    objects[(i / 7) % 5],
                    objects[(i / 3) % 5]
                )
            })
            .collect()
    }

    #[test]
    fn objective_decreases_each_epoch() {
        let corpus = toy_corpus(&sentences_200());
        let cfg = GloveConfig {
            dim: 8,
            epochs: 15,
            ..GloveConfig::default()
        };
        let (table, report) = train_toy_embedder(&corpus, &TextAnalyzer::default(), &cfg).unwrap();
        assert_eq!(table.dim(), 8);
        assert_eq!(report.objective.len(), 16);
        for w in report.objective.windows(2) {
            assert!(w[1] <= w[0] + 1e-6, "{:?}", report.objective);
        }
        assert!(report.objective.last().unwrap() < &report.objective[0]);
    }

    fn cosine(a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        dot / (na * nb)
    }

    #[test]
    fn shared_contexts_give_similar_vectors() {
        // `cat` and `dog` occur in identical contexts; `stone` never does.
        let mut lines = Vec::new();
        for i in 0..60 {
            let food = ["milk", "meat", "fish"][i % 3];
            lines.push(format!("my cat eats {food} daily."));
            lines.push(format!("my dog eats {food} daily."));
            let place = ["road", "hill", "wall"][i % 3];
            lines.push(format!("a stone lies on the {place} there."));
        }
        let cfg = GloveConfig {
            dim: 10,
            window: 3,
            epochs: 60,
            x_max: 10.0,
            ..GloveConfig::default()
        };
        let (t, _) = train_toy_embedder(&toy_corpus(&lines), &TextAnalyzer::default(), &cfg).unwrap();
        let (cat, dog, stone) = (t.get("cat").unwrap(), t.get("dog").unwrap(), t.get("stone").unwrap());
        assert!(cosine(cat, dog) > cosine(cat, stone));
        assert!(cosine(cat, dog) > cosine(dog, stone));
    }

    #[test]
    fn deterministic_given_seed() {
        let corpus = toy_corpus(&sentences_200()[..40]);
        let cfg = GloveConfig {
            dim: 4,
            epochs: 3,
            ..GloveConfig::default()
        };
        let a = train_toy_embedder(&corpus, &TextAnalyzer::default(), &cfg).unwrap();
        let b = train_toy_embedder(&corpus, &TextAnalyzer::default(), &cfg).unwrap();
        assert_eq!(a.0.to_glove_string(), b.0.to_glove_string());
        let c = train_toy_embedder(&corpus, &TextAnalyzer::default(), &GloveConfig { seed: 7, ..cfg }).unwrap();
        assert_ne!(a.0.to_glove_string(), c.0.to_glove_string());
    }

    #[test]
    fn degenerate_inputs_rejected() {
        let one_word = CoocMatrix::from_sentences(&[words("hello")], 5);
        assert!(train_cooc(&one_word, &GloveConfig::default()).is_err());
        let ok = CoocMatrix::from_sentences(&[words("a b")], 5);
        assert!(train_cooc(
            &ok,
            &GloveConfig {
                dim: 1,
                ..GloveConfig::default()
            }
        )
        .is_err());
    }
}
