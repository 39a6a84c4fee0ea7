//! Classical readability formulas and per-level formula reports.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::textproc::{DocAnalysis, TextAnalyzer};

const EMBEDDED_EASY_WORDS: &str = include_str!("../data/easy_words.txt");

/// Words considered familiar; anything else counts as a difficult word.
#[derive(Debug, Clone, Default)]
pub struct EasyWords(HashSet<String>);

impl EasyWords {
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED_EASY_WORDS)
    }

    /// One word per line; blank lines and `#` comments are skipped.
    pub fn parse(src: &str) -> Self {
        EasyWords(
            src.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&src))
    }

    pub fn empty() -> Self {
        EasyWords(HashSet::new())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for EasyWords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        EasyWords(iter.into_iter().map(|s| s.into().to_lowercase()).collect())
    }
}

/// Syllables at or above which a word is complex (also used for polysyllables).
pub const COMPLEX_SYLLABLES: usize = 3;
/// Letters strictly above which a word is long.
pub const LONG_WORD_LETTERS: usize = 6;

/// Surface counts feeding the formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TextStats {
    /// Letters and digits inside word tokens.
    pub characters: usize,
    pub words: usize,
    pub sentences: usize,
    pub syllables: usize,
    pub complex_words: usize,
    pub long_words: usize,
    pub difficult_words: usize,
}

impl TextStats {
    pub fn from_analysis(analysis: &DocAnalysis, easy_words: &EasyWords) -> Result<Self> {
        let mut stats = TextStats {
            sentences: analysis.sentence_count(),
            ..TextStats::default()
        };
        for (token, syllables) in analysis.words() {
            stats.words += 1;
            stats.characters += token.alnum_len();
            stats.syllables += syllables;
            if syllables >= COMPLEX_SYLLABLES {
                stats.complex_words += 1;
            }
            if token.letters > LONG_WORD_LETTERS {
                stats.long_words += 1;
            }
            if !easy_words.contains(&token.surface) {
                stats.difficult_words += 1;
            }
        }
        stats.check()?;
        Ok(stats)
    }

    fn check(&self) -> Result<()> {
        if self.sentences == 0 || self.words == 0 {
            return Err(Error::validation(format!(
                "text has {} sentences and {} words; formulas need at least one of each",
                self.sentences, self.words
            )));
        }
        Ok(())
    }
}

/// Free-function form of [`TextStats::from_analysis`].
pub fn compute_stats(analysis: &DocAnalysis, easy_words: &EasyWords) -> Result<TextStats> {
    TextStats::from_analysis(analysis, easy_words)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormulaId {
    ARI,
    FKGL,
    GFI,
    SMOG,
    CLI,
    LIX,
    RIX,
}

impl FormulaId {
    pub const ALL: [FormulaId; 7] = [
        FormulaId::ARI,
        FormulaId::FKGL,
        FormulaId::GFI,
        FormulaId::SMOG,
        FormulaId::CLI,
        FormulaId::LIX,
        FormulaId::RIX,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FormulaId::ARI => "ARI",
            FormulaId::FKGL => "FKGL",
            FormulaId::GFI => "GFI",
            FormulaId::SMOG => "SMOG",
            FormulaId::CLI => "CLI",
            FormulaId::LIX => "LIX",
            FormulaId::RIX => "RIX",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormulaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.to_ascii_uppercase();
        FormulaId::ALL
            .into_iter()
            .find(|f| f.as_str() == upper)
            .ok_or_else(|| Error::validation(format!("unknown formula {s:?}")))
    }
}

/// Evaluate one formula. Scores are not clamped and may be negative.
pub fn score_formula(id: FormulaId, stats: &TextStats) -> Result<f64> {
    stats.check()?;
    let chars = stats.characters as f64;
    let words = stats.words as f64;
    let sentences = stats.sentences as f64;
    let syllables = stats.syllables as f64;
    let complex = stats.complex_words as f64;
    let long = stats.long_words as f64;
    let score = match id {
        FormulaId::ARI => 4.71 * (chars / words) + 0.5 * (words / sentences) - 21.43,
        FormulaId::FKGL => 0.39 * (words / sentences) + 11.8 * (syllables / words) - 15.59,
        FormulaId::GFI => 0.4 * ((words / sentences) + 100.0 * (complex / words)),
        FormulaId::SMOG => (complex * (30.0 / sentences)).sqrt() + 3.1291,
        FormulaId::CLI => (5.89 * (chars / words)) - (30.0 * (sentences / words)) - 15.8,
        FormulaId::LIX => (words / sentences) + (long / words * 100.0),
        FormulaId::RIX => long / sentences,
    };
    Ok(score)
}

/// All seven scores in [`FormulaId::ALL`] order.
pub fn score_all(stats: &TextStats) -> Result<[f64; 7]> {
    let mut out = [0.0; 7];
    for id in FormulaId::ALL {
        out[id.index()] = score_formula(id, stats)?;
    }
    Ok(out)
}

/// Per-document formula scores for a corpus; `None` where stats failed.
pub fn score_documents(corpus: &Corpus, analyzer: &TextAnalyzer, easy_words: &EasyWords) -> Vec<Option<[f64; 7]>> {
    corpus
        .documents()
        .par_iter()
        .map(|doc| {
            let analysis = analyzer.analyze(&doc.text);
            TextStats::from_analysis(&analysis, easy_words)
                .and_then(|s| score_all(&s))
                .ok()
        })
        .collect()
}

/// Mean formula scores per level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormulaProfile {
    pub levels: Vec<String>,
    /// `rows[level][formula]`.
    pub rows: Vec<[f64; 7]>,
    /// Ids of documents that could not be scored.
    pub skipped: Vec<String>,
}

fn group_by_level(corpus: &Corpus, scores: &[Option<[f64; 7]>]) -> (Vec<Vec<[f64; 7]>>, Vec<String>) {
    let mut by_level = vec![Vec::new(); corpus.scheme().len()];
    let mut skipped = Vec::new();
    for (doc, score) in corpus.documents().iter().zip(scores) {
        match score {
            Some(s) => by_level[doc.level].push(*s),
            None => skipped.push(doc.id.clone()),
        }
    }
    (by_level, skipped)
}

fn empty_level_error(corpus: &Corpus, level: usize) -> Error {
    Error::validation(format!(
        "corpus {:?}: level {:?} has no scoreable documents",
        corpus.id(),
        corpus.scheme().levels()[level]
    ))
}

pub fn formula_profile_from_scores(corpus: &Corpus, scores: &[Option<[f64; 7]>]) -> Result<FormulaProfile> {
    let (by_level, skipped) = group_by_level(corpus, scores);
    let mut rows = Vec::with_capacity(by_level.len());
    for (level, docs) in by_level.iter().enumerate() {
        if docs.is_empty() {
            return Err(empty_level_error(corpus, level));
        }
        let mut row = [0.0; 7];
        for f in 0..7 {
            row[f] = docs.iter().map(|d| d[f]).sum::<f64>() / docs.len() as f64;
        }
        rows.push(row);
    }
    Ok(FormulaProfile {
        levels: corpus.scheme().levels().to_vec(),
        rows,
        skipped,
    })
}

pub fn formula_profile(corpus: &Corpus, analyzer: &TextAnalyzer, easy_words: &EasyWords) -> Result<FormulaProfile> {
    formula_profile_from_scores(corpus, &score_documents(corpus, analyzer, easy_words))
}

impl FormulaProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level");
        for id in FormulaId::ALL {
            out.push(',');
            out.push_str(id.as_str());
        }
        out.push('\n');
        for (level, row) in self.levels.iter().zip(&self.rows) {
            out.push_str(&csv_field(level));
            for v in row {
                out.push_str(&format!(",{v:.4}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Five-number summary with linearly interpolated quartiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Quantile at `p` of ascending `sorted` with interpolation at rank `p * (n - 1)`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl FiveNumber {
    pub fn of(values: &[f64]) -> Option<FiveNumber> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(FiveNumber {
            min: v[0],
            q1: quantile_sorted(&v, 0.25),
            median: quantile_sorted(&v, 0.5),
            q3: quantile_sorted(&v, 0.75),
            max: v[v.len() - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormulaDistribution {
    pub formula: FormulaId,
    pub levels: Vec<String>,
    pub summaries: Vec<FiveNumber>,
}

impl FormulaDistribution {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,min,q1,median,q3,max\n");
        for (level, s) in self.levels.iter().zip(&self.summaries) {
            out.push_str(&format!(
                "{},{:.4},{:.4},{:.4},{:.4},{:.4}\n",
                csv_field(level),
                s.min,
                s.q1,
                s.median,
                s.q3,
                s.max
            ));
        }
        out
    }
}

pub fn formula_distribution_from_scores(
    corpus: &Corpus,
    scores: &[Option<[f64; 7]>],
    id: FormulaId,
) -> Result<FormulaDistribution> {
    let (by_level, _) = group_by_level(corpus, scores);
    let summaries = by_level
        .iter()
        .enumerate()
        .map(|(level, docs)| {
            let values: Vec<f64> = docs.iter().map(|d| d[id.index()]).collect();
            FiveNumber::of(&values).ok_or_else(|| empty_level_error(corpus, level))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FormulaDistribution {
        formula: id,
        levels: corpus.scheme().levels().to_vec(),
        summaries,
    })
}

pub fn formula_distribution(
    corpus: &Corpus,
    analyzer: &TextAnalyzer,
    easy_words: &EasyWords,
    id: FormulaId,
) -> Result<FormulaDistribution> {
    formula_distribution_from_scores(corpus, &score_documents(corpus, analyzer, easy_words), id)
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, LabelScheme};
    use num_rational::Ratio;
    use proptest::prelude::*;

    fn stats_of(text: &str, easy: &EasyWords) -> Result<TextStats> {
        TextStats::from_analysis(&TextAnalyzer::default().analyze(text), easy)
    }

    #[test]
    fn stats_fixture() {
        let s = stats_of("The cat sat.", &EasyWords::embedded()).unwrap();
        assert_eq!(
            s,
            TextStats {
                characters: 9,
                words: 3,
                sentences: 1,
                syllables: 3,
                complex_words: 0,
                long_words: 0,
                difficult_words: 0,
            }
        );
        let s = stats_of("international law.", &EasyWords::empty()).unwrap();
        assert_eq!((s.long_words, s.difficult_words, s.complex_words), (1, 2, 1));
        assert!(stats_of("", &EasyWords::empty()).is_err());
        assert!(stats_of(" ?! ", &EasyWords::empty()).is_err());
    }

    #[test]
    fn hand_evaluated_scores() {
        let s = stats_of("The cat sat.", &EasyWords::embedded()).unwrap();
        let expect = [
            (FormulaId::ARI, -5.80),
            (FormulaId::FKGL, -2.62),
            (FormulaId::GFI, 1.20),
            (FormulaId::SMOG, 3.1291),
            (FormulaId::CLI, -8.13),
            (FormulaId::LIX, 3.00),
            (FormulaId::RIX, 0.00),
        ];
        for (id, v) in expect {
            let got = score_formula(id, &s).unwrap();
            assert!((got - v).abs() <= 1e-9, "{id}: {got} vs {v}");
        }
    }

    #[test]
    fn formulas_reject_empty_stats() {
        let s = TextStats::default();
        for id in FormulaId::ALL {
            assert!(score_formula(id, &s).is_err());
        }
    }

    #[test]
    fn formula_ids_parse() {
        assert_eq!("ari".parse::<FormulaId>().unwrap(), FormulaId::ARI);
        assert!("FLESCH".parse::<FormulaId>().is_err());
    }

    #[test]
    fn quartiles() {
        let f = FiveNumber::of(&[5.0, 1.0, 4.0, 2.0, 3.0]).unwrap();
        assert_eq!((f.min, f.q1, f.median, f.q3, f.max), (1.0, 2.0, 3.0, 4.0, 5.0));
        let c = FiveNumber::of(&[7.5; 4]).unwrap();
        assert!([c.min, c.q1, c.median, c.q3, c.max].iter().all(|&x| x == 7.5));
        let one = FiveNumber::of(&[2.0]).unwrap();
        assert_eq!((one.min, one.median, one.max), (2.0, 2.0, 2.0));
        let even = FiveNumber::of(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!((even.q1, even.median, even.q3), (1.75, 2.5, 3.25));
        assert!(FiveNumber::of(&[]).is_none());
    }

    fn doc(id: &str, text: &str, level: usize) -> Document {
        Document {
            id: id.into(),
            text: text.into(),
            level,
        }
    }

    #[test]
    fn profile_singletons_and_duplicates() {
        let scheme = LabelScheme::numbered("s", 2).unwrap();
        let easy = EasyWords::embedded();
        let analyzer = TextAnalyzer::default();
        let a = "The cat sat.";
        let b = "Administrative organizations deliberately postponed comprehensive negotiations.";
        let c = Corpus::new("c", scheme.clone(), vec![doc("a", a, 0), doc("b", b, 1)]).unwrap();
        let p = formula_profile(&c, &analyzer, &easy).unwrap();
        assert_eq!(p.rows.len(), 2);
        assert_eq!(p.rows[0], score_all(&stats_of(a, &easy).unwrap()).unwrap());
        assert_eq!(p.rows[1], score_all(&stats_of(b, &easy).unwrap()).unwrap());

        let dup = Corpus::new("c", scheme, vec![doc("a", a, 0), doc("a2", a, 0), doc("b", b, 1)]).unwrap();
        assert_eq!(formula_profile(&dup, &analyzer, &easy).unwrap().rows, p.rows);
        assert!(p.to_csv().starts_with("level,ARI,FKGL,GFI,SMOG,CLI,LIX,RIX\nL0,"));
    }

    #[test]
    fn profile_counts_skips_and_rejects_empty_levels() {
        let scheme = LabelScheme::numbered("s", 2).unwrap();
        let c = Corpus::new(
            "c",
            scheme,
            vec![
                doc("a", "The cat sat.", 0),
                doc("b", "!!!", 1),
                doc("c", "Dogs run.", 1),
            ],
        )
        .unwrap();
        let p = formula_profile(&c, &TextAnalyzer::default(), &EasyWords::embedded()).unwrap();
        assert_eq!(p.skipped, ["b"]);

        let only_bad = Corpus::new(
            "c",
            LabelScheme::numbered("s", 2).unwrap(),
            vec![doc("a", "The cat sat.", 0), doc("b", "???", 1)],
        )
        .unwrap();
        let err = formula_profile(&only_bad, &TextAnalyzer::default(), &EasyWords::embedded())
            .unwrap_err()
            .to_string();
        assert!(err.contains("L1"), "{err}");
    }

    // Exact rational evaluation of each formula's non-radical part.
    fn rational_oracle(id: FormulaId, s: &TextStats) -> f64 {
        let r = |n: usize| Ratio::new(n as i128, 1);
        let c = |num: i128, den: i128| Ratio::new(num, den);
        let (ch, w, se, sy, cx, lg) = (
            r(s.characters),
            r(s.words),
            r(s.sentences),
            r(s.syllables),
            r(s.complex_words),
            r(s.long_words),
        );
        let to_f = |x: Ratio<i128>| *x.numer() as f64 / *x.denom() as f64;
        match id {
            FormulaId::ARI => to_f(c(471, 100) * (ch / w) + c(1, 2) * (w / se) - c(2143, 100)),
            FormulaId::FKGL => to_f(c(39, 100) * (w / se) + c(118, 10) * (sy / w) - c(1559, 100)),
            FormulaId::GFI => to_f(c(2, 5) * ((w / se) + r(100) * (cx / w))),
            FormulaId::SMOG => to_f(cx * (r(30) / se)).sqrt() + 3.1291,
            FormulaId::CLI => to_f(c(589, 100) * (ch / w) - r(30) * (se / w) - c(158, 10)),
            FormulaId::LIX => to_f((w / se) + (lg / w) * r(100)),
            FormulaId::RIX => to_f(lg / se),
        }
    }

    fn arb_stats() -> impl Strategy<Value = TextStats> {
        (1usize..400, 1usize..40).prop_flat_map(|(words, sentences)| {
            (
                Just(words),
                Just(sentences),
                words..words * 12,
                words..words * 4,
                0..=words,
                0..=words,
                0..=words,
            )
                .prop_map(|(words, sentences, characters, syllables, complex, long, difficult)| {
                    TextStats {
                        characters,
                        words,
                        sentences,
                        syllables,
                        complex_words: complex,
                        long_words: long,
                        difficult_words: difficult,
                    }
                })
        })
    }

    proptest! {
        #[test]
        fn matches_rational_oracle(s in arb_stats()) {
            for id in FormulaId::ALL {
                let got = score_formula(id, &s).unwrap();
                let want = rational_oracle(id, &s);
                prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "{id}: {got} vs {want}");
            }
        }

        // Same words packed into fewer sentences: per-word ratios stay fixed
        // while words per sentence grows.
        #[test]
        fn increasing_in_sentence_length(
            sentences in 2usize..20,
            wps in 3usize..20,
            factor in 2usize..5,
        ) {
            let words = sentences * wps;
            let short = TextStats {
                characters: words * 5,
                words,
                sentences,
                syllables: words * 2,
                complex_words: words / 3,
                long_words: words / 3,
                difficult_words: 0,
            };
            let long = TextStats { sentences: sentences.div_ceil(factor), ..short };
            prop_assume!(long.sentences < short.sentences);
            for id in FormulaId::ALL {
                let lo = score_formula(id, &short).unwrap();
                let hi = score_formula(id, &long).unwrap();
                prop_assert!(hi > lo, "{id}: {hi} <= {lo}");
            }
        }
    }
}
