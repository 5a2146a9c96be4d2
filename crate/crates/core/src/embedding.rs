//! Word and character n-gram vectors, OOV composition, corpus frequencies.
//!
//! File formats (all UTF-8, space separated):
//!
//! * word vectors: header `<count> <dim>`, then `<word> v1 .. v_dim` per row;
//! * n-gram vectors: header `<count> <dim> <minn> <maxn>`, rows as above,
//!   keyed by n-grams of the `<`/`>`-marked word;
//! * frequencies: `<word>\t<count>` per row.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::textio::{read_lines, write_string};

pub const DEFAULT_MINN: usize = 3;
pub const DEFAULT_MAXN: usize = 6;

/// Dense row-major vector table keyed by string.
#[derive(Debug, Clone, PartialEq)]
struct VectorTable<T> {
    index: HashMap<Box<str>, usize>,
    keys: Vec<Box<str>>,
    data: Vec<T>,
}

impl<T: Scalar> VectorTable<T> {
    fn new() -> Self {
        Self {
            index: HashMap::new(),
            keys: Vec::new(),
            data: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.keys.len()
    }

    fn get(&self, key: &str, dim: usize) -> Option<&[T]> {
        self.index.get(key).map(|&i| &self.data[i * dim..(i + 1) * dim])
    }

    fn insert(&mut self, key: &str, values: &[T]) -> bool {
        if self.index.contains_key(key) {
            return false;
        }
        self.index.insert(key.into(), self.keys.len());
        self.keys.push(key.into());
        self.data.extend_from_slice(values);
        true
    }

    fn rows(&self, dim: usize) -> impl Iterator<Item = (&str, &[T])> {
        self.keys
            .iter()
            .enumerate()
            .map(move |(i, k)| (&**k, &self.data[i * dim..(i + 1) * dim]))
    }
}

/// A vector looked up or composed for a word.
#[derive(Debug, Clone, PartialEq)]
pub struct WordVector<'a, T: Clone> {
    pub vector: Cow<'a, [T]>,
    pub in_vocab: bool,
}

/// Word unigram vectors plus explicit character n-gram vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore<T: Scalar = f32> {
    dim: usize,
    minn: usize,
    maxn: usize,
    words: VectorTable<T>,
    ngrams: VectorTable<T>,
}

impl<T: Scalar> EmbeddingStore<T> {
    /// An empty store of the given dimensionality and n-gram bounds.
    pub fn new(dim: usize, minn: usize, maxn: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Contract("embedding dimension must be positive".into()));
        }
        if minn == 0 || minn > maxn {
            return Err(Error::Contract(format!("invalid n-gram bounds {minn}..{maxn}")));
        }
        Ok(Self {
            dim,
            minn,
            maxn,
            words: VectorTable::new(),
            ngrams: VectorTable::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ngram_bounds(&self) -> (usize, usize) {
        (self.minn, self.maxn)
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn ngram_count(&self) -> usize {
        self.ngrams.len()
    }

    pub fn add_word(&mut self, word: &str, vector: &[T]) -> Result<()> {
        self.check_row(word, vector)?;
        if !self.words.insert(word, vector) {
            return Err(Error::Contract(format!("duplicate word {word:?}")));
        }
        Ok(())
    }

    pub fn add_ngram(&mut self, ngram: &str, vector: &[T]) -> Result<()> {
        self.check_row(ngram, vector)?;
        if !self.ngrams.insert(ngram, vector) {
            return Err(Error::Contract(format!("duplicate n-gram {ngram:?}")));
        }
        Ok(())
    }

    fn check_row(&self, key: &str, vector: &[T]) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::Contract(format!(
                "{key:?}: expected {} components, got {}",
                self.dim,
                vector.len()
            )));
        }
        if !vector.iter().all(|v| v.is_finite()) {
            return Err(Error::Contract(format!("{key:?}: non-finite component")));
        }
        Ok(())
    }

    /// True if `word` has its own (non-composed) vector.
    pub fn has_word(&self, word: &str) -> bool {
        self.words.index.contains_key(word)
    }

    pub fn word_vector(&self, word: &str) -> Option<&[T]> {
        self.words.get(word, self.dim)
    }

    pub fn ngram_vector(&self, ngram: &str) -> Option<&[T]> {
        self.ngrams.get(ngram, self.dim)
    }

    /// The stored vector for in-vocabulary words; otherwise the mean of the
    /// vectors of the word's known n-grams. `None` when no n-gram is known.
    pub fn vector_for(&self, word: &str) -> Option<WordVector<'_, T>> {
        if let Some(v) = self.word_vector(word) {
            return Some(WordVector {
                vector: Cow::Borrowed(v),
                in_vocab: true,
            });
        }
        if word.is_empty() {
            return None;
        }
        let mut sum = vec![T::zero(); self.dim];
        let mut known = 0usize;
        for gram in extract_ngrams(word, self.minn, self.maxn) {
            if let Some(v) = self.ngram_vector(&gram) {
                for (s, x) in sum.iter_mut().zip(v) {
                    *s = *s + *x;
                }
                known += 1;
            }
        }
        if known == 0 {
            return None;
        }
        let n = T::from_usize(known).expect("count fits in a float");
        for s in &mut sum {
            *s = *s / n;
        }
        Some(WordVector {
            vector: Cow::Owned(sum),
            in_vocab: false,
        })
    }

    /// Loads a store from a word-vector file and, optionally, an n-gram file.
    pub fn load(word_path: &Path, ngram_path: Option<&Path>) -> Result<Self> {
        let word_lines = read_lines(word_path)?;
        let (count, dim) = parse_header(word_path, &word_lines, 2)
            .map(|h| (h[0], h[1]))?;
        let (minn, maxn, ngram_lines) = match ngram_path {
            Some(p) => {
                let lines = read_lines(p)?;
                let h = parse_header(p, &lines, 4)?;
                if h[1] != dim {
                    return Err(Error::format(
                        p,
                        1,
                        format!("n-gram dimension {} differs from word dimension {dim}", h[1]),
                    ));
                }
                if h[2] == 0 || h[2] > h[3] {
                    return Err(Error::format(p, 1, format!("invalid n-gram bounds {}..{}", h[2], h[3])));
                }
                (h[2], h[3], Some((p, h[0], lines)))
            }
            None => (DEFAULT_MINN, DEFAULT_MAXN, None),
        };
        let mut store = Self::new(dim, minn, maxn).map_err(|e| Error::format(word_path, 1, e.to_string()))?;
        parse_rows(word_path, &word_lines, count, dim, |k, v| store.words.insert(k, v))?;
        if let Some((p, ngram_count, lines)) = ngram_lines {
            parse_rows(p, &lines, ngram_count, dim, |k, v| store.ngrams.insert(k, v))?;
        }
        Ok(store)
    }

    pub fn write_words(&self, path: &Path) -> Result<()> {
        let mut out = format!("{} {}\n", self.words.len(), self.dim);
        write_rows(&mut out, self.words.rows(self.dim));
        write_string(path, &out)
    }

    pub fn write_ngrams(&self, path: &Path) -> Result<()> {
        let mut out = format!("{} {} {} {}\n", self.ngrams.len(), self.dim, self.minn, self.maxn);
        write_rows(&mut out, self.ngrams.rows(self.dim));
        write_string(path, &out)
    }

    /// Iterates word rows in file order.
    pub fn words(&self) -> impl Iterator<Item = (&str, &[T])> {
        self.words.rows(self.dim)
    }
}

fn parse_header(path: &Path, lines: &[String], fields: usize) -> Result<Vec<usize>> {
    let header = lines
        .first()
        .ok_or_else(|| Error::format(path, 1, "missing header"))?;
    let values: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::format(path, 1, format!("malformed header {header:?}")))?;
    if values.len() != fields {
        return Err(Error::format(
            path,
            1,
            format!("header needs {fields} integers, found {}", values.len()),
        ));
    }
    if values[1] == 0 {
        return Err(Error::format(path, 1, "dimension must be positive"));
    }
    Ok(values)
}

fn parse_rows<T: Scalar>(
    path: &Path,
    lines: &[String],
    count: usize,
    dim: usize,
    mut insert: impl FnMut(&str, &[T]) -> bool,
) -> Result<()> {
    let mut values = Vec::with_capacity(dim);
    let mut seen = 0usize;
    for (idx, line) in lines.iter().enumerate().skip(1) {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_ascii_whitespace();
        let key = parts.next().expect("non-blank line has a field");
        values.clear();
        for p in parts {
            let v: T = p
                .parse()
                .map_err(|_| Error::format(path, lineno, format!("bad number {p:?}")))?;
            if !v.is_finite() {
                return Err(Error::format(path, lineno, format!("non-finite value {p:?}")));
            }
            values.push(v);
        }
        if values.len() != dim {
            return Err(Error::format(
                path,
                lineno,
                format!("expected {dim} values for {key:?}, found {}", values.len()),
            ));
        }
        if !insert(key, &values) {
            return Err(Error::format(path, lineno, format!("duplicate entry {key:?}")));
        }
        seen += 1;
    }
    if seen != count {
        return Err(Error::format(
            path,
            1,
            format!("header declares {count} rows, file has {seen}"),
        ));
    }
    Ok(())
}

fn write_rows<'a, T: Scalar>(out: &mut String, rows: impl Iterator<Item = (&'a str, &'a [T])>) {
    for (key, v) in rows {
        out.push_str(key);
        for x in v {
            // Display gives the shortest representation that parses back exactly.
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
}

/// Character n-grams of `<word>` with lengths in `[minn, maxn]`, ordered by
/// start position then length. The whole marked word is included when its
/// length is in range; repeated n-grams are kept.
pub fn extract_ngrams(word: &str, minn: usize, maxn: usize) -> Vec<String> {
    let marked: Vec<char> = std::iter::once('<')
        .chain(word.chars())
        .chain(std::iter::once('>'))
        .collect();
    let mut out = Vec::new();
    for start in 0..marked.len() {
        for n in minn..=maxn {
            let end = start + n;
            if end > marked.len() {
                break;
            }
            out.push(marked[start..end].iter().collect());
        }
    }
    out
}

/// Cosine similarity; 0 when either vector is all zeros.
pub fn cosine<T: Scalar>(u: &[T], v: &[T]) -> Result<T> {
    if u.len() != v.len() {
        return Err(Error::Contract(format!(
            "cosine of vectors with {} and {} components",
            u.len(),
            v.len()
        )));
    }
    let (mut dot, mut nu, mut nv) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in u.iter().zip(v) {
        dot = dot + a * b;
        nu = nu + a * a;
        nv = nv + b * b;
    }
    if nu == T::zero() || nv == T::zero() {
        return Ok(T::zero());
    }
    let c = dot / (nu.sqrt() * nv.sqrt());
    Ok(c.max(-T::one()).min(T::one()))
}

/// Corpus counts used for noisy-channel priors and frequency analysis.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: HashMap<String, u64>,
    total: u64,
}

impl FrequencyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts<I, S>(counts: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut t = Self::new();
        for (w, c) in counts {
            t.add(w, c);
        }
        t
    }

    /// Counts every token of every line.
    pub fn from_tokens<'a, I>(tokens: I) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut t = Self::new();
        for tok in tokens {
            t.add(tok, 1);
        }
        t
    }

    pub fn add(&mut self, word: impl Into<String>, count: u64) {
        *self.counts.entry(word.into()).or_insert(0) += count;
        self.total += count;
    }

    /// Reads `<word>\t<count>` rows. Repeated words are an error.
    pub fn load(path: &Path) -> Result<Self> {
        let mut t = Self::new();
        for (idx, line) in read_lines(path)?.iter().enumerate() {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (word, count) = line
                .split_once('\t')
                .ok_or_else(|| Error::format(path, lineno, "expected <word>\\t<count>"))?;
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| Error::format(path, lineno, format!("bad count {count:?}")))?;
            if t.counts.contains_key(word) {
                return Err(Error::format(path, lineno, format!("duplicate word {word:?}")));
            }
            t.add(word, count);
        }
        Ok(t)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut rows: Vec<_> = self.counts.iter().collect();
        rows.sort();
        let mut out = String::new();
        for (w, c) in rows {
            let _ = writeln!(out, "{w}\t{c}");
        }
        write_string(path, &out)
    }

    /// Count of `word`, 0 when unseen.
    pub fn get(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn vocab_size(&self) -> usize {
        self.counts.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_words() {
        let f = write_tmp("2 3\ngoing 1 0 0\npoint 0 1 0\n");
        let store = EmbeddingStore::<f32>::load(f.path(), None).unwrap();
        assert_eq!(store.dim(), 3);
        assert_eq!(store.word_count(), 2);
        assert_eq!(store.word_vector("point"), Some(&[0.0, 1.0, 0.0][..]));
        assert_eq!(store.ngram_bounds(), (DEFAULT_MINN, DEFAULT_MAXN));
    }

    #[test]
    fn load_ngrams() {
        let w = write_tmp("1 2\ngo 1 1\n");
        let g = write_tmp("2 2 3 4\n<go 1 0\ngo> 0 1\n");
        let store = EmbeddingStore::<f64>::load(w.path(), Some(g.path())).unwrap();
        assert_eq!(store.ngram_count(), 2);
        assert_eq!(store.ngram_bounds(), (3, 4));
        assert_eq!(store.ngram_vector("<go"), Some(&[1.0, 0.0][..]));
    }

    #[test]
    fn short_row_is_a_format_error() {
        let f = write_tmp("2 3\ngoing 1 0 0\npoint 0 1\n");
        let err = EmbeddingStore::<f32>::load(f.path(), None).unwrap_err();
        assert!(matches!(err, Error::Format { line: 3, .. }), "{err}");
    }

    #[test]
    fn duplicate_and_count_errors() {
        let dup = write_tmp("2 1\na 1\na 2\n");
        assert!(matches!(
            EmbeddingStore::<f32>::load(dup.path(), None).unwrap_err(),
            Error::Format { line: 3, .. }
        ));
        let short = write_tmp("3 1\na 1\nb 2\n");
        assert!(EmbeddingStore::<f32>::load(short.path(), None).is_err());
        let nan = write_tmp("1 1\na NaN\n");
        assert!(EmbeddingStore::<f32>::load(nan.path(), None).is_err());
        let w = write_tmp("1 2\ngo 1 1\n");
        let g = write_tmp("1 3 3 6\n<go 1 0 0\n");
        assert!(EmbeddingStore::<f32>::load(w.path(), Some(g.path())).is_err());
    }

    #[test]
    fn ngram_extraction() {
        assert_eq!(extract_ngrams("cat", 3, 3), ["<ca", "cat", "at>"]);
        assert_eq!(extract_ngrams("a", 3, 3), ["<a>"]);
        let g = extract_ngrams("goint", 3, 6);
        assert_eq!(g.len(), 14);
        assert!(g.contains(&"<goint".to_string()));
        assert!(g.contains(&"goint>".to_string()));
        assert!(!g.contains(&"<goint>".to_string()));
        assert!(extract_ngrams("cat", 3, 6).contains(&"<cat>".to_string()));
    }

    #[test]
    fn vector_for_paths() {
        let mut s = EmbeddingStore::<f64>::new(3, 3, 3).unwrap();
        s.add_word("going", &[0.2, 0.4, 0.6]).unwrap();
        s.add_ngram("<ab", &[1.0, 0.0, 0.0]).unwrap();
        s.add_ngram("bc>", &[0.0, 1.0, 0.0]).unwrap();

        let v = s.vector_for("going").unwrap();
        assert!(v.in_vocab);
        assert_eq!(&*v.vector, &[0.2, 0.4, 0.6]);

        let v = s.vector_for("abc").unwrap();
        assert!(!v.in_vocab);
        assert_eq!(&*v.vector, &[0.5, 0.5, 0.0]);

        assert!(s.vector_for("xyz").is_none());
        assert!(s.vector_for("").is_none());
    }

    #[test]
    fn cosine_examples() {
        assert_abs_diff_eq!(cosine(&[1.0f64, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert_abs_diff_eq!(cosine(&[1.0f64, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(
            cosine(&[1.0f64, 1.0], &[1.0, 0.0]).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-9
        );
        assert_eq!(cosine(&[0.0f32, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert!(cosine(&[1.0f32], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn frequency_file() {
        let f = write_tmp("going\t100\npoint\t1000\n");
        let t = FrequencyTable::load(f.path()).unwrap();
        assert_eq!(t.get("point"), 1000);
        assert_eq!(t.get("joint"), 0);
        assert_eq!(t.total(), 1100);
        assert_eq!(t.vocab_size(), 2);
        let bad = write_tmp("going 100\n");
        assert!(FrequencyTable::load(bad.path()).is_err());
        let dup = write_tmp("a\t1\na\t2\n");
        assert!(FrequencyTable::load(dup.path()).is_err());
    }
}
