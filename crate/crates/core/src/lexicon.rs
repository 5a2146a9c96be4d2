//! Reference lexicons: loading, fusion by union, membership, augmentation.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::sync::Arc;

use crate::error::Result;
use crate::text_norm::{normalize_form, tokenize_line};
use crate::textio::read_lines;

/// A set of normalized word forms fused from one or more word lists.
///
/// Forms are also kept bucketed by length (in characters) so that candidate
/// search can skip words whose length alone rules them out.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    forms: HashSet<Arc<str>>,
    by_len: BTreeMap<usize, Vec<Arc<str>>>,
    source_count: usize,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a lexicon from already-normalized or raw forms. Entries are
    /// tokenized, so multi-word entries contribute each part.
    pub fn from_forms<I, S>(forms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut lex = Lexicon::new();
        for f in forms {
            lex.insert_line(f.as_ref());
        }
        lex.sort_buckets();
        lex
    }

    /// Loads and fuses word-list files: UTF-8, one entry per line, lines
    /// starting with `#` ignored.
    pub fn load<P: AsRef<Path>>(paths: &[P]) -> Result<Self> {
        let mut lex = Lexicon::new();
        for path in paths {
            for line in read_lines(path.as_ref())? {
                if line.starts_with('#') {
                    continue;
                }
                lex.insert_line(&line);
            }
            lex.source_count += 1;
        }
        lex.sort_buckets();
        Ok(lex)
    }

    fn insert_line(&mut self, line: &str) {
        for tok in tokenize_line(line) {
            let form: Arc<str> = Arc::from(tok.as_str());
            if self.forms.insert(form.clone()) {
                self.by_len.entry(form.chars().count()).or_default().push(form);
            }
        }
    }

    fn sort_buckets(&mut self) {
        for bucket in self.by_len.values_mut() {
            bucket.sort_unstable();
        }
    }

    /// Exact membership on the normalized form of `form`.
    pub fn contains(&self, form: &str) -> bool {
        if self.forms.contains(form) {
            return true;
        }
        normalize_form(form).is_some_and(|n| self.forms.contains(n.as_str()))
    }

    /// Returns a new lexicon holding the union; `self` is left untouched.
    pub fn augment<I, S>(&self, forms: I) -> Lexicon
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut out = self.clone();
        for f in forms {
            out.insert_line(f.as_ref());
        }
        out.sort_buckets();
        out
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn source_count(&self) -> usize {
        self.source_count
    }

    /// All forms, shortest first, lexicographic within a length.
    pub fn iter(&self) -> impl Iterator<Item = &Arc<str>> {
        self.by_len.values().flatten()
    }

    /// Forms whose character length lies in `[min_len, max_len]`.
    pub fn with_len_between(&self, min_len: usize, max_len: usize) -> impl Iterator<Item = &Arc<str>> {
        self.by_len.range(min_len..=max_len).flat_map(|(_, v)| v.iter())
    }

    pub(crate) fn get_shared(&self, form: &str) -> Option<&Arc<str>> {
        self.forms.get(form)
    }
}

impl PartialEq for Lexicon {
    fn eq(&self, other: &Self) -> bool {
        self.forms == other.forms
    }
}

impl Eq for Lexicon {}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file_with(lines: &[&str]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for l in lines {
            writeln!(f, "{l}").unwrap();
        }
        f
    }

    #[test]
    fn union_of_files() {
        let a = file_with(&["Going", "point"]);
        let b = file_with(&["point", "anemia"]);
        let lex = Lexicon::load(&[a.path(), b.path()]).unwrap();
        assert_eq!(lex.len(), 3);
        assert_eq!(lex.source_count(), 2);
        for w in ["going", "point", "anemia"] {
            assert!(lex.contains(w));
        }
    }

    #[test]
    fn single_specialized_entry() {
        let f = file_with(&["sclerosing"]);
        let lex = Lexicon::load(&[f.path()]).unwrap();
        assert!(lex.contains("sclerosing"));
    }

    #[test]
    fn empty_file_and_comments() {
        let empty = file_with(&[]);
        assert!(Lexicon::load(&[empty.path()]).unwrap().is_empty());
        let commented = file_with(&["# header", "word", "", "  "]);
        let lex = Lexicon::load(&[commented.path()]).unwrap();
        assert_eq!(lex.len(), 1);
        assert!(!lex.contains("header"));
    }

    #[test]
    fn multiword_entries_are_split() {
        let f = file_with(&["Deep vein thrombosis", "x-ray 5mg"]);
        let lex = Lexicon::load(&[f.path()]).unwrap();
        assert_eq!(lex.len(), 4);
        assert!(lex.contains("thrombosis"));
        assert!(lex.contains("x-ray"));
        assert!(!lex.contains("5mg"));
    }

    #[test]
    fn contains_normalizes_query() {
        let lex = Lexicon::from_forms(["going"]);
        assert!(lex.contains("GOING"));
        assert!(!lex.contains("goint"));
        assert!(!Lexicon::new().contains("anything"));
    }

    #[test]
    fn augment_is_a_new_value() {
        let a = Lexicon::from_forms(["a"]);
        let ab = a.augment(["b"]);
        assert_eq!(ab, Lexicon::from_forms(["a", "b"]));
        assert_eq!(a.len(), 1);
        assert_eq!(a.augment(["a"]), a);
        assert_eq!(a.augment(Vec::<String>::new()), a);

        let fixed = Lexicon::new().augment(["phlebitis"]);
        assert!(fixed.contains("phlebitis"));
    }

    #[test]
    fn missing_file_names_path() {
        let err = Lexicon::load(&["/nonexistent/words.txt"]).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/words.txt"));
    }

    #[test]
    fn bad_utf8_reports_line() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(b"ok\nfine\n\xff\xfe\n").unwrap();
        let err = Lexicon::load(&[f.path()]).unwrap_err();
        assert!(matches!(err, crate::Error::Decode { line: 3, .. }), "{err}");
    }

    #[test]
    fn length_buckets() {
        let lex = Lexicon::from_forms(["a", "bb", "cc", "ddd", "é"]);
        let two: Vec<_> = lex.with_len_between(2, 2).map(|s| s.to_string()).collect();
        assert_eq!(two, ["bb", "cc"]);
        assert_eq!(lex.with_len_between(1, 1).count(), 2);
        assert_eq!(lex.iter().count(), 5);
    }
}
