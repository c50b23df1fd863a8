//! Text processing shared by documents and queries: Unicode normalization,
//! lowercasing, punctuation splitting, stopword removal and Porter stemming.

pub mod porter;

use std::collections::HashSet;
use std::sync::OnceLock;

use unicode_normalization::UnicodeNormalization;

const STOPWORDS_V1: &str = include_str!("../../data/stopwords-v1.txt");

/// Version tag of the bundled stopword list.
pub const STOPWORDS_VERSION: u32 = 1;

fn stopwords() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| {
        STOPWORDS_V1
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    })
}

pub fn is_stopword(word: &str) -> bool {
    stopwords().contains(word)
}

/// Splits normalized, lowercased text into alphanumeric runs and drops
/// stopwords. No stemming.
pub fn normalize_and_filter(text: &str) -> Vec<String> {
    let lowered: String = text.nfc().flat_map(char::to_lowercase).collect();
    lowered
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty() && !is_stopword(t))
        .map(str::to_string)
        .collect()
}

/// Full pipeline: the terms that would be indexed for `text`, in order.
pub fn tokenize(text: &str) -> Vec<String> {
    normalize_and_filter(text)
        .into_iter()
        .map(|t| porter::stem(&t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_query_from_fair_ranking_topics() {
        assert_eq!(
            tokenize("museum baroque librarian architecture library"),
            ["museum", "baroqu", "librarian", "architectur", "librari"]
        );
    }

    #[test]
    fn empty_and_all_stopwords() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("the of and").is_empty());
        assert!(tokenize("  ,.;!  ").is_empty());
    }

    #[test]
    fn punctuation_and_case() {
        assert_eq!(tokenize("Museums, LIBRARIES!"), ["museum", "librari"]);
        assert_eq!(tokenize("state-of-the-art"), ["state", "art"]);
    }

    #[test]
    fn nfc_composition_before_splitting() {
        // "e" + combining acute composes to a single letter, keeping one token.
        assert_eq!(tokenize("cafe\u{301}"), tokenize("caf\u{e9}"));
        assert_eq!(tokenize("cafe\u{301}").len(), 1);
    }

    #[test]
    fn stopword_list_is_versioned_and_nonempty() {
        assert_eq!(STOPWORDS_VERSION, 1);
        assert_eq!(stopwords().len(), 318);
        assert!(is_stopword("the"));
        assert!(!is_stopword("museum"));
    }
}
