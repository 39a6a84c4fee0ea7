//! Lexicon-plus-suffix part-of-speech tagger.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Token;
use crate::error::{Error, Result};

const EMBEDDED_LEXICON: &str = include_str!("../../data/lexicon.tsv");

/// Relative pronouns and determiners counted as special subordinators.
pub const WH_SUBORDINATORS: &[&str] = &["who", "whom", "whose", "which", "that", "where", "whereby", "wherein"];

pub fn is_wh_subordinator(word: &str) -> bool {
    let lower = word.to_lowercase();
    WH_SUBORDINATORS.contains(&lower.as_str())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Tag {
    Noun,
    Propn,
    Pron,
    Verb,
    Adj,
    Adv,
    Adp,
    Conj,
    Sconj,
    Det,
    Num,
    Punct,
    X,
}

impl Tag {
    pub const ALL: [Tag; 13] = [
        Tag::Noun,
        Tag::Propn,
        Tag::Pron,
        Tag::Verb,
        Tag::Adj,
        Tag::Adv,
        Tag::Adp,
        Tag::Conj,
        Tag::Sconj,
        Tag::Det,
        Tag::Num,
        Tag::Punct,
        Tag::X,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Noun => "NOUN",
            Tag::Propn => "PROPN",
            Tag::Pron => "PRON",
            Tag::Verb => "VERB",
            Tag::Adj => "ADJ",
            Tag::Adv => "ADV",
            Tag::Adp => "ADP",
            Tag::Conj => "CONJ",
            Tag::Sconj => "SCONJ",
            Tag::Det => "DET",
            Tag::Num => "NUM",
            Tag::Punct => "PUNCT",
            Tag::X => "X",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Tag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::validation(format!("unknown tag {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub token: Token,
    pub tag: Tag,
}

/// Closed-class word list mapping lowercase words to tags.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, Tag>,
}

impl Lexicon {
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED_LEXICON).expect("embedded lexicon is valid")
    }

    /// Parse `word<TAB>TAG` lines. The first entry for a word wins.
    pub fn parse(src: &str) -> Result<Self> {
        let mut entries = HashMap::new();
        for (i, line) in src.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, tag) = line
                .split_once('\t')
                .ok_or_else(|| Error::validation(format!("lexicon line {}: expected word<TAB>TAG", i + 1)))?;
            let tag: Tag = tag
                .trim()
                .parse()
                .map_err(|e: Error| e.context(format!("lexicon line {}", i + 1)))?;
            entries.entry(word.trim().to_lowercase()).or_insert(tag);
        }
        Ok(Lexicon { entries })
    }

    pub fn get(&self, word: &str) -> Option<Tag> {
        self.entries.get(&word.to_lowercase()).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn has_suffix(lower: &str, suffix: &str) -> bool {
    // Require a stem of at least three letters so `fly`, `red`, `thing` fall through.
    lower.len() >= suffix.len() + 3 && lower.ends_with(suffix)
}

fn tag_word(token: &Token, sentence_initial: bool, lexicon: &Lexicon) -> Tag {
    let surface = token.surface.as_str();
    if surface.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        return Tag::Num;
    }
    if let Some(tag) = lexicon.get(surface) {
        return tag;
    }
    if !token.has_letters() {
        return Tag::X;
    }
    if !sentence_initial && surface.chars().next().is_some_and(char::is_uppercase) {
        return Tag::Propn;
    }
    let lower = surface.to_lowercase();
    if has_suffix(&lower, "ly") {
        Tag::Adv
    } else if has_suffix(&lower, "ing") || has_suffix(&lower, "ed") {
        Tag::Verb
    } else if ["ous", "ful", "able", "ible"].iter().any(|s| has_suffix(&lower, s)) {
        Tag::Adj
    } else {
        Tag::Noun
    }
}

/// Tag the tokens of one sentence. The first word token is treated as
/// sentence-initial, so its capital letter does not make it a proper noun.
pub fn pos_tag(tokens: &[Token], lexicon: &Lexicon) -> Vec<TaggedToken> {
    let first_word = tokens.iter().position(|t| t.is_word);
    tokens
        .iter()
        .enumerate()
        .map(|(i, token)| {
            let tag = if token.is_punct {
                Tag::Punct
            } else {
                tag_word(token, Some(i) == first_word, lexicon)
            };
            TaggedToken {
                token: token.clone(),
                tag,
            }
        })
        .collect()
}
