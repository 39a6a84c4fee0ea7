use crate::error::{Error, Result};

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

fn count_part(letters: &[char]) -> usize {
    let mut groups = 0usize;
    let mut prev_vowel = false;
    for &c in letters {
        let v = is_vowel(c);
        if v && !prev_vowel {
            groups += 1;
        }
        prev_vowel = v;
    }
    // Terminal silent 'e': a lone final 'e' after a consonant other than 'l'.
    let n = letters.len();
    if n >= 2 && letters[n - 1] == 'e' && !is_vowel(letters[n - 2]) && letters[n - 2] != 'l' {
        groups = groups.saturating_sub(1);
    }
    groups.max(1)
}

/// Vowel-group syllable estimate.
///
/// Counts maximal runs of `a e i o u y`, drops a terminal silent `e`, and
/// floors at one. Hyphenated compounds are counted part by part.
pub fn count_syllables(word: &str) -> Result<usize> {
    let lower = word.to_lowercase();
    let mut total = 0;
    let mut any = false;
    for part in lower.split(['-', '\u{2010}']) {
        let letters: Vec<char> = part.chars().filter(|c| c.is_alphabetic()).collect();
        if letters.is_empty() {
            continue;
        }
        any = true;
        total += count_part(&letters);
    }
    if !any {
        return Err(Error::validation(format!(
            "cannot count syllables of {word:?}: no letters"
        )));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_examples() {
        assert_eq!(count_syllables("cat").unwrap(), 1);
        assert_eq!(count_syllables("readability").unwrap(), 5);
        assert_eq!(count_syllables("make").unwrap(), 1);
        assert_eq!(count_syllables("table").unwrap(), 2);
        assert_eq!(count_syllables("the").unwrap(), 1);
        assert_eq!(count_syllables("International").unwrap(), 5);
        assert_eq!(count_syllables("state-of-the-art").unwrap(), 4);
        assert_eq!(count_syllables("rhythm").unwrap(), 1);
    }

    #[test]
    fn no_letters_is_an_error() {
        assert!(count_syllables("2024").is_err());
        assert!(count_syllables("").is_err());
    }

    proptest! {
        #[test]
        fn at_least_one_and_monotone_under_ing(word in "[a-zA-Z]{1,14}") {
            let base = count_syllables(&word).unwrap();
            prop_assert!(base >= 1);
            let longer = count_syllables(&format!("{word}ing")).unwrap();
            prop_assert!(longer >= base);
        }
    }
}
