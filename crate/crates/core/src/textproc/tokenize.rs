use serde::{Deserialize, Serialize};

/// A word or punctuation token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// Alphabetic characters in `surface`.
    pub letters: usize,
    pub is_word: bool,
    pub is_punct: bool,
}

impl Token {
    pub fn new(surface: impl Into<String>) -> Self {
        let surface = surface.into();
        let letters = surface.chars().filter(|c| c.is_alphabetic()).count();
        let is_word = surface.chars().any(char::is_alphanumeric);
        Token {
            is_punct: !is_word && !surface.is_empty(),
            surface,
            letters,
            is_word,
        }
    }

    /// Letters plus digits.
    pub fn alnum_len(&self) -> usize {
        self.surface.chars().filter(|c| c.is_alphanumeric()).count()
    }

    pub fn has_letters(&self) -> bool {
        self.letters > 0
    }
}

fn joins_letters(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '-' | '\u{2010}')
}

fn joins_digits(c: char) -> bool {
    matches!(c, '.' | ',')
}

/// Split a sentence into tokens.
///
/// Words are maximal runs of letters and digits, joined across a single
/// internal apostrophe or hyphen (`don't`, `state-of-the-art`) and, between
/// digits, a decimal point or thousands comma (`2.5`, `1,000`). Every other
/// non-space character becomes its own punctuation token.
pub fn tokenize(sentence: &str) -> Vec<Token> {
    let chars: Vec<char> = sentence.chars().collect();
    let n = chars.len();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < n {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if !c.is_alphanumeric() {
            tokens.push(Token::new(c.to_string()));
            i += 1;
            continue;
        }
        let start = i;
        i += 1;
        while i < n {
            if chars[i].is_alphanumeric() {
                i += 1;
            } else if i + 1 < n
                && chars[i + 1].is_alphanumeric()
                && (joins_letters(chars[i])
                    || (joins_digits(chars[i]) && chars[i - 1].is_ascii_digit() && chars[i + 1].is_ascii_digit()))
            {
                i += 2;
            } else {
                break;
            }
        }
        tokens.push(Token::new(chars[start..i].iter().collect::<String>()));
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(s: &str) -> Vec<String> {
        tokenize(s).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn splits_words_and_punctuation() {
        let toks = tokenize("The cat sat.");
        assert_eq!(surfaces("The cat sat."), ["The", "cat", "sat", "."]);
        assert_eq!(toks.iter().filter(|t| t.is_word).count(), 3);
        assert!(toks[3].is_punct);
    }

    #[test]
    fn internal_joiners() {
        assert_eq!(surfaces("state-of-the-art"), ["state-of-the-art"]);
        assert_eq!(surfaces("don't"), ["don't"]);
        assert_eq!(surfaces("rock -- roll"), ["rock", "-", "-", "roll"]);
        assert_eq!(surfaces("'quoted'"), ["'", "quoted", "'"]);
        assert_eq!(surfaces("2.5 and 1,000, ok"), ["2.5", "and", "1,000", ",", "ok"]);
    }

    #[test]
    fn token_counts() {
        let t = Token::new("don't");
        assert_eq!(t.letters, 4);
        assert!(t.is_word && !t.is_punct);
        let n = Token::new("42");
        assert_eq!((n.letters, n.alnum_len()), (0, 2));
        assert!(n.is_word);
    }
}
