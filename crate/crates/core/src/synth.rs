//! Seeded generator of leveled toy corpora whose text difficulty tracks the
//! label. Used for tests, benchmarks and demonstrations.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, LabelScheme};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub name: String,
    pub levels: usize,
    /// Documents per level, unless `counts` is given.
    pub per_level: usize,
    /// Explicit document count per level.
    pub counts: Option<Vec<usize>>,
    pub seed: u64,
    /// Relabel difficulty band `k` as level `pi(k)` for a seeded
    /// permutation `pi` without fixed points.
    pub shuffle_labels: bool,
}

impl SynthConfig {
    pub fn new(name: impl Into<String>, levels: usize, per_level: usize, seed: u64) -> Self {
        SynthConfig {
            name: name.into(),
            levels,
            per_level,
            counts: None,
            seed,
            shuffle_labels: false,
        }
    }

    fn counts(&self) -> Result<Vec<usize>> {
        if self.levels < 2 {
            return Err(Error::validation(format!("need >= 2 levels, got {}", self.levels)));
        }
        let counts = match &self.counts {
            Some(c) if c.len() != self.levels => {
                return Err(Error::validation(format!(
                    "{} counts given for {} levels",
                    c.len(),
                    self.levels
                )))
            }
            Some(c) => c.clone(),
            None => vec![self.per_level; self.levels],
        };
        if let Some(k) = counts.iter().position(|&c| c == 0) {
            return Err(Error::validation(format!("level {k} would have no documents")));
        }
        Ok(counts)
    }
}

// Word pools: (easy, hard). Hard words are long and polysyllabic, and all
// are chosen so the tagger assigns the intended part of speech.
const NOUNS: (&[&str], &[&str]) = (
    &[
        "cat", "dog", "sun", "man", "boy", "girl", "book", "tree", "car", "ball", "hat", "bed", "cup", "fish", "bird",
        "home", "box", "egg", "pig", "hen",
    ],
    &[
        "organization",
        "administration",
        "university",
        "environment",
        "government",
        "phenomenon",
        "responsibility",
        "consideration",
        "interpretation",
        "infrastructure",
        "characteristic",
        "circumstance",
        "documentation",
        "representative",
        "manufacturer",
        "investigation",
        "certification",
        "accumulation",
    ],
);
const VERBS: (&[&str], &[&str]) = (
    &[
        "sat", "ran", "saw", "had", "got", "met", "hid", "ate", "made", "took", "found", "kept",
    ],
    &[
        "investigated",
        "demonstrated",
        "established",
        "considered",
        "facilitated",
        "accommodated",
        "characterized",
        "substantiated",
        "reconsidered",
        "differentiated",
        "incorporated",
        "communicated",
    ],
);
const ADJS: (&[&str], &[&str]) = (
    &[
        "big", "red", "hot", "old", "new", "sad", "good", "small", "long", "warm",
    ],
    &[
        "dangerous",
        "remarkable",
        "considerable",
        "comprehensible",
        "mysterious",
        "unbelievable",
        "meticulous",
        "controversial",
        "extraordinary",
        "indispensable",
        "ambiguous",
        "incredible",
    ],
);
const ADVS: (&[&str], &[&str]) = (
    &["fast", "now", "then", "soon", "well"],
    &[
        "significantly",
        "particularly",
        "consequently",
        "unquestionably",
        "simultaneously",
        "predominantly",
        "approximately",
        "systematically",
    ],
);
const PREPS: &[&str] = &[
    "in",
    "on",
    "with",
    "under",
    "near",
    "from",
    "behind",
    "throughout",
    "beyond",
    "despite",
];
const DETS: &[&str] = &["the", "a", "this", "that", "every", "some"];
const CONJS: &[&str] = &["and", "but"];
const SCONJS: &[&str] = &["because", "although", "while", "whereas", "unless"];

struct Writer<'a> {
    rng: &'a mut ChaCha8Rng,
    /// Difficulty in [0, 1].
    d: f64,
}

impl Writer<'_> {
    fn pick<'w>(&mut self, pool: (&[&'w str], &[&'w str])) -> &'w str {
        let hard = self.rng.gen_bool((0.05 + 0.85 * self.d).clamp(0.0, 1.0));
        let list = if hard { pool.1 } else { pool.0 };
        list.choose(self.rng).unwrap()
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p.clamp(0.0, 1.0))
    }

    fn noun_phrase(&mut self, out: &mut Vec<String>) {
        out.push(DETS.choose(self.rng).unwrap().to_string());
        let adjs = usize::from(self.chance(0.2 + 0.5 * self.d)) + usize::from(self.chance(0.4 * self.d));
        for _ in 0..adjs {
            out.push(self.pick(ADJS).to_string());
        }
        out.push(self.pick(NOUNS).to_string());
    }

    fn clause(&mut self, out: &mut Vec<String>) {
        self.noun_phrase(out);
        if self.chance(0.6 * self.d) {
            out.push(self.pick(ADVS).to_string());
        }
        out.push(self.pick(VERBS).to_string());
        self.noun_phrase(out);
        let pps = usize::from(self.chance(0.15 + 0.6 * self.d)) + usize::from(self.chance(0.5 * self.d));
        for _ in 0..pps {
            out.push(PREPS.choose(self.rng).unwrap().to_string());
            self.noun_phrase(out);
        }
    }

    fn sentence(&mut self) -> String {
        let mut words = Vec::new();
        self.clause(&mut words);
        let extra = usize::from(self.chance(0.1 + 0.7 * self.d)) + usize::from(self.chance(0.6 * self.d));
        for _ in 0..extra {
            match self.rng.gen_range(0..3) {
                0 => {
                    words.push(",".into());
                    words.push(CONJS.choose(self.rng).unwrap().to_string());
                }
                1 => {
                    words.push(",".into());
                    words.push(SCONJS.choose(self.rng).unwrap().to_string());
                }
                _ => {
                    words.push(",".into());
                    words.push("which".into());
                }
            }
            self.clause(&mut words);
        }
        let mut s = String::new();
        for w in &words {
            if !s.is_empty() && w != "," {
                s.push(' ');
            }
            s.push_str(w);
        }
        let mut chars = s.chars();
        let first = chars.next().unwrap().to_uppercase().collect::<String>();
        format!("{first}{}.", chars.as_str())
    }

    fn document(&mut self) -> String {
        let n = self.rng.gen_range(4..=7);
        (0..n).map(|_| self.sentence()).collect::<Vec<_>>().join(" ")
    }
}

/// Seeded permutation of `0..n` with no fixed points (`n >= 2`).
pub fn derangement(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        p.shuffle(rng);
        if p.iter().enumerate().all(|(i, &x)| i != x) {
            return p;
        }
    }
}

/// Generate a corpus. Documents appear in a seeded random order so that
/// corpus position carries no level information.
pub fn generate(cfg: &SynthConfig) -> Result<Corpus> {
    let counts = cfg.counts()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let relabel = if cfg.shuffle_labels {
        derangement(cfg.levels, &mut rng)
    } else {
        (0..cfg.levels).collect()
    };
    let mut items = Vec::new();
    for (band, &count) in counts.iter().enumerate() {
        let base = band as f64 / (cfg.levels - 1) as f64;
        for _ in 0..count {
            let jitter: f64 = rng.gen_range(-0.06..0.06);
            let mut w = Writer {
                rng: &mut rng,
                d: (base + jitter).clamp(0.0, 1.0),
            };
            items.push((relabel[band], w.document()));
        }
    }
    items.shuffle(&mut rng);
    let docs = items
        .into_iter()
        .enumerate()
        .map(|(i, (level, text))| Document {
            id: format!("{}-{i:04}", cfg.name),
            text,
            level,
        })
        .collect();
    Corpus::new(
        cfg.name.clone(),
        LabelScheme::numbered(cfg.name.clone(), cfg.levels)?,
        docs,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{score_formula, FormulaId, TextStats};
    use crate::textproc::TextAnalyzer;
    use crate::EasyWords;

    #[test]
    fn deterministic_and_shaped() {
        let mut cfg = SynthConfig::new("toy", 3, 5, 7);
        let a = generate(&cfg).unwrap();
        assert_eq!(a, generate(&cfg).unwrap());
        assert_eq!(a.level_counts(), [5, 5, 5]);
        cfg.counts = Some(vec![4, 2, 1]);
        assert_eq!(generate(&cfg).unwrap().level_counts(), [4, 2, 1]);
        cfg.counts = Some(vec![4, 2]);
        assert!(generate(&cfg).is_err());
        assert!(generate(&SynthConfig::new("x", 1, 5, 7)).is_err());
    }

    #[test]
    fn derangements_have_no_fixed_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..8 {
            for _ in 0..20 {
                let p = derangement(n, &mut rng);
                let mut sorted = p.clone();
                sorted.sort_unstable();
                assert_eq!(sorted, (0..n).collect::<Vec<_>>());
                assert!(p.iter().enumerate().all(|(i, &x)| i != x));
            }
        }
    }

    #[test]
    fn difficulty_rises_with_level() {
        let c = generate(&SynthConfig::new("toy", 5, 20, 3)).unwrap();
        let analyzer = TextAnalyzer::default();
        let easy = EasyWords::embedded();
        // Per level: ARI sum, words, sentences, letters.
        let mut acc = [[0.0; 4]; 5];
        for d in c.documents() {
            let stats = TextStats::from_analysis(&analyzer.analyze(&d.text), &easy).unwrap();
            let a = &mut acc[d.level];
            a[0] += score_formula(FormulaId::ARI, &stats).unwrap() / 20.0;
            a[1] += stats.words as f64;
            a[2] += stats.sentences as f64;
            a[3] += stats.characters as f64;
        }
        let ari: Vec<f64> = acc.iter().map(|a| a[0]).collect();
        let sentence_len: Vec<f64> = acc.iter().map(|a| a[1] / a[2]).collect();
        let word_len: Vec<f64> = acc.iter().map(|a| a[3] / a[1]).collect();
        for series in [&ari, &sentence_len, &word_len] {
            assert!(series.windows(2).all(|w| w[0] < w[1]), "{series:?}");
        }
    }

    #[test]
    fn shuffled_labels_move_every_band() {
        let mut cfg = SynthConfig::new("neg", 4, 1, 5);
        cfg.counts = Some(vec![8, 4, 2, 1]);
        cfg.shuffle_labels = true;
        let c = generate(&cfg).unwrap();
        let counts = c.level_counts();
        assert_eq!(counts.iter().sum::<usize>(), 15);
        assert!(counts.iter().enumerate().all(|(i, &n)| n != [8, 4, 2, 1][i]));
    }
}
