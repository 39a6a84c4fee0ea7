//! Greedy shallow chunker over coarse tags.
//!
//! Grammar, matched left to right at each position:
//!
//! ```text
//! PP := ADP NP
//! NP := DET? NUM? ADJ* (NOUN | PROPN)+  |  PRON
//! VP := ADV* VERB+ ADV*
//! ```
//!
//! A matched PP also reports its inner NP.

use serde::{Deserialize, Serialize};

use super::{Tag, TaggedToken};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhraseKind {
    NP,
    VP,
    PP,
}

/// Half-open token span `[start, end)` within a sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phrase {
    pub kind: PhraseKind,
    pub start: usize,
    pub end: usize,
}

impl Phrase {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

fn match_np(tags: &[Tag], i: usize) -> Option<usize> {
    let n = tags.len();
    if i < n && tags[i] == Tag::Pron {
        return Some(i + 1);
    }
    let mut j = i;
    if j < n && tags[j] == Tag::Det {
        j += 1;
    }
    if j < n && tags[j] == Tag::Num {
        j += 1;
    }
    while j < n && tags[j] == Tag::Adj {
        j += 1;
    }
    let head = j;
    while j < n && matches!(tags[j], Tag::Noun | Tag::Propn) {
        j += 1;
    }
    (j > head).then_some(j)
}

fn match_vp(tags: &[Tag], i: usize) -> Option<usize> {
    let n = tags.len();
    let mut j = i;
    while j < n && tags[j] == Tag::Adv {
        j += 1;
    }
    let verbs = j;
    while j < n && tags[j] == Tag::Verb {
        j += 1;
    }
    if j == verbs {
        return None;
    }
    while j < n && tags[j] == Tag::Adv {
        j += 1;
    }
    Some(j)
}

pub fn chunk(tagged: &[TaggedToken]) -> Vec<Phrase> {
    let tags: Vec<Tag> = tagged.iter().map(|t| t.tag).collect();
    let mut phrases = Vec::new();
    let mut i = 0;
    while i < tags.len() {
        if tags[i] == Tag::Adp {
            if let Some(end) = match_np(&tags, i + 1) {
                phrases.push(Phrase {
                    kind: PhraseKind::PP,
                    start: i,
                    end,
                });
                phrases.push(Phrase {
                    kind: PhraseKind::NP,
                    start: i + 1,
                    end,
                });
                i = end;
                continue;
            }
        }
        if let Some(end) = match_np(&tags, i) {
            phrases.push(Phrase {
                kind: PhraseKind::NP,
                start: i,
                end,
            });
            i = end;
        } else if let Some(end) = match_vp(&tags, i) {
            phrases.push(Phrase {
                kind: PhraseKind::VP,
                start: i,
                end,
            });
            i = end;
        } else {
            i += 1;
        }
    }
    phrases
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textproc::Token;
    use proptest::prelude::*;

    fn tagged(tags: &[Tag]) -> Vec<TaggedToken> {
        tags.iter()
            .map(|&tag| TaggedToken {
                token: Token::new(if tag == Tag::Punct { "," } else { "w" }),
                tag,
            })
            .collect()
    }

    fn np(start: usize, end: usize) -> Phrase {
        Phrase {
            kind: PhraseKind::NP,
            start,
            end,
        }
    }

    #[test]
    fn grammar_examples() {
        use Tag::*;
        assert_eq!(
            chunk(&tagged(&[Det, Noun, Verb])),
            [
                np(0, 2),
                Phrase {
                    kind: PhraseKind::VP,
                    start: 2,
                    end: 3
                }
            ]
        );
        assert_eq!(
            chunk(&tagged(&[Adp, Det, Noun])),
            [
                Phrase {
                    kind: PhraseKind::PP,
                    start: 0,
                    end: 3
                },
                np(1, 3)
            ]
        );
        assert!(chunk(&[]).is_empty());
    }

    #[test]
    fn longer_patterns() {
        use Tag::*;
        // the two old grey dogs quickly ran away
        let p = chunk(&tagged(&[Det, Num, Adj, Adj, Noun, Adv, Verb, Adv]));
        assert_eq!(
            p,
            [
                np(0, 5),
                Phrase {
                    kind: PhraseKind::VP,
                    start: 5,
                    end: 8
                }
            ]
        );
        // she , and it
        assert_eq!(chunk(&tagged(&[Pron, Punct, Conj, Pron])), [np(0, 1), np(3, 4)]);
        // dangling determiner and preposition match nothing
        assert!(chunk(&tagged(&[Det, Adj, Adp, Punct])).is_empty());
    }

    fn any_tag() -> impl Strategy<Value = Tag> {
        proptest::sample::select(Tag::ALL.to_vec())
    }

    proptest! {
        #[test]
        fn spans_are_in_bounds_and_disjoint_per_kind(tags in proptest::collection::vec(any_tag(), 0..40)) {
            let phrases = chunk(&tagged(&tags));
            for p in &phrases {
                prop_assert!(p.start < p.end && p.end <= tags.len());
            }
            for kind in [PhraseKind::NP, PhraseKind::VP, PhraseKind::PP] {
                let mut spans: Vec<_> = phrases.iter().filter(|p| p.kind == kind).collect();
                spans.sort_by_key(|p| p.start);
                for w in spans.windows(2) {
                    prop_assert!(w[0].end <= w[1].start);
                }
            }
        }
    }
}
