//! Rule-based sentence segmentation.

use std::collections::HashSet;

use crate::error::{Error, Result};

const EMBEDDED_ABBREVIATIONS: &str = include_str!("../../data/abbreviations.txt");

/// Lowercased abbreviations (with their trailing period) that never end a sentence.
#[derive(Debug, Clone)]
pub struct Abbreviations(HashSet<String>);

impl Abbreviations {
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED_ABBREVIATIONS).expect("embedded abbreviation list is valid")
    }

    /// One entry per line; blank lines and `#` comments are ignored.
    pub fn parse(src: &str) -> Result<Self> {
        let mut set = HashSet::new();
        for (i, line) in src.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !line.ends_with('.') {
                return Err(Error::validation(format!(
                    "abbreviation list line {}: entry {line:?} must end with '.'",
                    i + 1
                )));
            }
            set.insert(line.to_lowercase());
        }
        Ok(Abbreviations(set))
    }

    pub fn contains(&self, word_with_period: &str) -> bool {
        self.0.contains(&word_with_period.to_lowercase())
    }
}

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '}' | '\u{201d}' | '\u{2019}' | '\u{bb}')
}

/// Split `text` into trimmed sentences.
///
/// A sentence ends at a run of `.`, `!` or `?` (plus closing quotes or
/// brackets) followed by whitespace or the end of the text. A lone period
/// closing a known abbreviation does not end a sentence, and periods inside
/// numbers are never followed by whitespace, so they never split.
pub fn split_sentences(text: &str, abbreviations: &Abbreviations) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if !is_terminator(c) {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < chars.len() && is_terminator(chars[j].1) {
            j += 1;
        }
        let run_end = j;
        while j < chars.len() && is_closer(chars[j].1) {
            j += 1;
        }
        let at_boundary = j == chars.len() || chars[j].1.is_whitespace();
        let lone_period = c == '.' && run_end == i + 1;
        if at_boundary && !(lone_period && ends_with_abbreviation(&text[start..=pos], abbreviations)) {
            let end = chars.get(j).map_or(text.len(), |&(p, _)| p);
            push_trimmed(&mut out, &text[start..end]);
            start = end;
        }
        i = j;
    }
    push_trimmed(&mut out, &text[start..]);
    out
}

fn ends_with_abbreviation(upto_period: &str, abbreviations: &Abbreviations) -> bool {
    let word = upto_period
        .rsplit(char::is_whitespace)
        .next()
        .unwrap_or("")
        .trim_start_matches(|c: char| !c.is_alphanumeric());
    !word.is_empty() && abbreviations.contains(word)
}

fn push_trimmed(out: &mut Vec<String>, s: &str) {
    let s = s.trim();
    if !s.is_empty() {
        out.push(s.to_string());
    }
}
