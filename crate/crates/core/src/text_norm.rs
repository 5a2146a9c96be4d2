//! Tokenization and normalization.
//!
//! A line is split on whitespace and on punctuation (any character that is
//! neither alphanumeric, a hyphen, nor whitespace). Pieces are lowercased and
//! stripped of leading/trailing hyphens; a piece that still contains anything
//! other than letters and hyphens (digits, for instance) is dropped whole, so
//! `9am` disappears instead of turning into `am`.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A normalized word form: non-empty, lowercase letters and interior hyphens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Token(String);

impl Token {
    /// Normalizes a single piece of text, or `None` if it does not survive.
    pub fn new(raw: &str) -> Option<Token> {
        normalize_piece(raw).map(Token)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

fn is_separator(c: char) -> bool {
    c.is_whitespace() || !(c.is_alphanumeric() || c == '-')
}

fn normalize_piece(piece: &str) -> Option<String> {
    let trimmed = piece.trim_matches('-');
    if trimmed.is_empty() || !trimmed.chars().all(|c| c.is_alphabetic() || c == '-') {
        return None;
    }
    let lower = trimmed.to_lowercase();
    // Lowercasing can expand into non-alphabetic marks (e.g. U+0130).
    lower
        .chars()
        .all(|c| c.is_alphabetic() || c == '-')
        .then_some(lower)
}

/// Splits a raw line into normalized tokens, preserving order.
pub fn tokenize_line(line: &str) -> Vec<Token> {
    line.split(is_separator)
        .filter_map(normalize_piece)
        .map(Token)
        .collect()
}

/// Normalizes a single form for lookup, e.g. a query against a lexicon.
///
/// Unlike [`tokenize_line`] this never splits: input that would tokenize into
/// anything other than exactly one token yields `None`.
pub fn normalize_form(form: &str) -> Option<String> {
    if form.chars().any(is_separator) {
        return None;
    }
    normalize_piece(form)
}

/// True if `s` is already in normalized form.
pub fn is_normalized(s: &str) -> bool {
    normalize_form(s).is_some_and(|n| n == s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(line: &str) -> Vec<String> {
        tokenize_line(line).into_iter().map(Token::into_string).collect()
    }

    #[test]
    fn clinical_line_drops_numerals() {
        assert_eq!(surfaces("Pt going to OR at 9am."), ["pt", "going", "to", "or", "at"]);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize_line("").is_empty());
        assert!(tokenize_line("   \t ").is_empty());
    }

    #[test]
    fn hyphens_kept_inside_stripped_outside() {
        assert_eq!(surfaces("X-ray X-RAY"), ["x-ray", "x-ray"]);
        assert_eq!(surfaces("-lead trail- --- a--b"), ["lead", "trail", "a--b"]);
    }

    #[test]
    fn diacritics_survive() {
        assert_eq!(surfaces("Ziekenhuis: café, Ëen"), ["ziekenhuis", "café", "ëen"]);
    }

    #[test]
    fn punctuation_splits() {
        assert_eq!(surfaces("bp/hr (stable);ok"), ["bp", "hr", "stable", "ok"]);
        assert_eq!(surfaces("snake_case"), ["snake", "case"]);
        assert_eq!(surfaces("5mg q4h"), Vec::<String>::new());
    }

    #[test]
    fn normalize_form_rejects_multiword() {
        assert_eq!(normalize_form("GOING").as_deref(), Some("going"));
        assert_eq!(normalize_form("two words"), None);
        assert_eq!(normalize_form("-x-ray-").as_deref(), Some("x-ray"));
        assert!(is_normalized("x-ray"));
        assert!(!is_normalized("X-ray"));
    }
}
