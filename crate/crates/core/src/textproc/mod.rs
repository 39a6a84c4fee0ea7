//! Deterministic linguistic analysis: sentences, tokens, syllables, coarse
//! part-of-speech tags and shallow phrase chunks.

mod chunker;
mod segment;
mod syllable;
mod tagger;
mod tokenize;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use chunker::{chunk, Phrase, PhraseKind};
pub use segment::{split_sentences, Abbreviations};
pub use syllable::count_syllables;
pub use tagger::{is_wh_subordinator, pos_tag, Lexicon, Tag, TaggedToken, WH_SUBORDINATORS};
pub use tokenize::{tokenize, Token};

use crate::error::{Error, Result};

/// Sentence segmentation with the embedded abbreviation list.
pub fn segment_sentences(text: &str) -> Vec<String> {
    split_sentences(text, &Abbreviations::embedded())
}

/// One analyzed sentence. `syllables` runs parallel to `tokens` and is zero
/// for punctuation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub tokens: Vec<TaggedToken>,
    pub syllables: Vec<usize>,
    pub phrases: Vec<Phrase>,
}

impl Sentence {
    pub fn word_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.token.is_word).count()
    }

    pub fn words(&self) -> impl Iterator<Item = (&Token, usize)> {
        self.tokens
            .iter()
            .zip(&self.syllables)
            .filter(|(t, _)| t.token.is_word)
            .map(|(t, &s)| (&t.token, s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocAnalysis {
    pub sentences: Vec<Sentence>,
}

impl DocAnalysis {
    pub fn sentence_count(&self) -> usize {
        self.sentences.len()
    }

    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(Sentence::word_count).sum()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }

    /// Word tokens with their syllable counts, across all sentences.
    pub fn words(&self) -> impl Iterator<Item = (&Token, usize)> {
        self.sentences.iter().flat_map(Sentence::words)
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

/// Bundles the lexicon and abbreviation list used by every analysis step.
#[derive(Debug, Clone)]
pub struct TextAnalyzer {
    lexicon: Lexicon,
    abbreviations: Abbreviations,
}

impl Default for TextAnalyzer {
    fn default() -> Self {
        TextAnalyzer {
            lexicon: Lexicon::embedded(),
            abbreviations: Abbreviations::embedded(),
        }
    }
}

impl TextAnalyzer {
    pub fn new(lexicon: Lexicon, abbreviations: Abbreviations) -> Self {
        TextAnalyzer { lexicon, abbreviations }
    }

    /// Load overrides from disk; `None` keeps the embedded data.
    pub fn from_files(lexicon: Option<&Path>, abbreviations: Option<&Path>) -> Result<Self> {
        let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::io(p, e));
        let lexicon = match lexicon {
            Some(p) => Lexicon::parse(&read(p)?).map_err(|e| e.context(p.display()))?,
            None => Lexicon::embedded(),
        };
        let abbreviations = match abbreviations {
            Some(p) => Abbreviations::parse(&read(p)?).map_err(|e| e.context(p.display()))?,
            None => Abbreviations::embedded(),
        };
        Ok(Self::new(lexicon, abbreviations))
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn segment(&self, text: &str) -> Vec<String> {
        split_sentences(text, &self.abbreviations)
    }

    /// Full analysis. Sentences without any word token are dropped; words
    /// without letters (numbers) count as one syllable.
    pub fn analyze(&self, text: &str) -> DocAnalysis {
        let sentences = self
            .segment(text)
            .iter()
            .filter_map(|s| {
                let tokens = tokenize(s);
                if !tokens.iter().any(|t| t.is_word) {
                    return None;
                }
                let syllables = tokens
                    .iter()
                    .map(|t| match (t.is_word, t.has_letters()) {
                        (false, _) => 0,
                        (true, false) => 1,
                        (true, true) => count_syllables(&t.surface).unwrap_or(1),
                    })
                    .collect();
                let tagged = pos_tag(&tokens, &self.lexicon);
                let phrases = chunk(&tagged);
                Some(Sentence {
                    tokens: tagged,
                    syllables,
                    phrases,
                })
            })
            .collect();
        DocAnalysis { sentences }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn analyze_fixture() {
        let a = TextAnalyzer::default().analyze("The cat sat. It slept on the mat!");
        assert_eq!(a.sentence_count(), 2);
        assert_eq!(a.word_count(), 8);
        assert_eq!(a.token_count(), 10);
        let s0 = &a.sentences[0];
        assert_eq!(s0.syllables, [1, 1, 1, 0]);
        assert_eq!(s0.phrases.len(), 2);
        let kinds: Vec<_> = a.sentences[1].phrases.iter().map(|p| p.kind).collect();
        assert_eq!(kinds, [PhraseKind::NP, PhraseKind::VP, PhraseKind::PP, PhraseKind::NP]);
    }

    #[test]
    fn punctuation_only_sentences_dropped() {
        let a = TextAnalyzer::default().analyze("... Hello there.");
        assert_eq!(a.sentence_count(), 1);
        assert!(TextAnalyzer::default().analyze("").is_empty());
    }

    #[test]
    fn every_word_has_a_syllable() {
        let a = TextAnalyzer::default().analyze("In 1999, 42 rhythms played. Ok?");
        assert!(a.words().all(|(_, s)| s >= 1));
    }

    proptest! {
        #[test]
        fn tokenize_preserves_letters(s in "[a-zA-Z0-9 ,.!?'\\-]{0,60}") {
            let from_tokens: String = tokenize(&s)
                .iter()
                .filter(|t| t.is_word)
                .flat_map(|t| t.surface.chars().filter(|c| c.is_alphabetic()).collect::<Vec<_>>())
                .collect();
            let from_input: String = s.chars().filter(|c| c.is_alphabetic()).collect();
            prop_assert_eq!(from_tokens, from_input);
        }

        #[test]
        fn analysis_is_pure(s in "[a-zA-Z ,.!?]{0,80}") {
            let analyzer = TextAnalyzer::default();
            prop_assert_eq!(analyzer.analyze(&s), analyzer.analyze(&s));
        }
    }
}
