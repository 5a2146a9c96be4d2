//! Replacement-candidate generation.
//!
//! Two phases over the lexicon:
//!
//! 1. every form within restricted Damerau-Levenshtein distance 2 of the
//!    misspelling (length-bucketed scan with banded early abandon);
//! 2. every form one of whose Double Metaphone codes lies within distance 1
//!    of one of the misspelling's codes, which reaches forms further away
//!    in spelling but close in sound.
//!
//! Results are deduplicated by form and returned in lexicographic order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::edit_distance::{dl_distance, BoundedMatcher};
use crate::embedding::{EmbeddingStore, FrequencyTable};
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::phonetics::{double_metaphone, PhoneticCode};
use crate::scalar::Scalar;

pub const SPELLING_RADIUS: usize = 2;
pub const PHONETIC_RADIUS: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Candidate {
    pub form: String,
    /// Edit distance to the misspelling.
    pub dl: usize,
    /// Smallest edit distance between any code of the candidate and any code
    /// of the misspelling.
    pub dm_dl: usize,
    pub in_embedding_vocab: bool,
    pub frequency: u64,
}

/// Which candidates survive generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidatePolicy {
    #[default]
    All,
    /// Only forms with their own word vector.
    InVocabOnly,
}

/// Phonetic code → lexicon forms bearing it (primary or alternate).
#[derive(Debug, Clone, Default)]
pub struct PhoneticIndex {
    by_code: HashMap<Box<str>, BTreeSet<Arc<str>>>,
    codes_by_len: BTreeMap<usize, Vec<Box<str>>>,
    code_of: HashMap<Arc<str>, PhoneticCode>,
}

impl PhoneticIndex {
    pub fn build(lexicon: &Lexicon) -> Self {
        let mut index = PhoneticIndex::default();
        index.extend(lexicon.iter().cloned());
        index
    }

    fn extend(&mut self, forms: impl IntoIterator<Item = Arc<str>>) {
        for form in forms {
            if self.code_of.contains_key(&form) {
                continue;
            }
            let code = double_metaphone(&form);
            for c in code.codes() {
                let entry = self.by_code.entry(c.into()).or_default();
                if entry.is_empty() {
                    self.codes_by_len.entry(c.chars().count()).or_default().push(c.into());
                }
                entry.insert(form.clone());
            }
            self.code_of.insert(form, code);
        }
    }

    /// Forms stored under exactly `code`.
    pub fn lookup(&self, code: &str) -> impl Iterator<Item = &str> {
        self.by_code.get(code).into_iter().flatten().map(|f| &**f)
    }

    pub fn code_count(&self) -> usize {
        self.by_code.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_code.is_empty()
    }

    fn code_for(&self, form: &str) -> PhoneticCode {
        self.code_of
            .get(form)
            .cloned()
            .unwrap_or_else(|| double_metaphone(form))
    }
}

/// A lexicon paired with its phonetic index.
#[derive(Debug, Clone)]
pub struct CandidateGenerator {
    lexicon: Lexicon,
    index: PhoneticIndex,
}

impl CandidateGenerator {
    pub fn new(lexicon: Lexicon) -> Self {
        let index = PhoneticIndex::build(&lexicon);
        Self { lexicon, index }
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn index(&self) -> &PhoneticIndex {
        &self.index
    }

    /// A generator over the lexicon extended with `forms`; the phonetic index
    /// is extended incrementally rather than rebuilt.
    pub fn augmented<I, S>(&self, forms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let lexicon = self.lexicon.augment(forms);
        let mut index = self.index.clone();
        let new_forms: Vec<Arc<str>> = lexicon
            .iter()
            .filter(|f| !self.lexicon.contains(f))
            .cloned()
            .collect();
        index.extend(new_forms);
        Self { lexicon, index }
    }

    pub fn generate<T: Scalar>(
        &self,
        misspelling: &str,
        freqs: &FrequencyTable,
        store: &EmbeddingStore<T>,
    ) -> Result<Vec<Candidate>> {
        generate_candidates(misspelling, &self.lexicon, &self.index, freqs, store)
    }
}

fn code_distance(a: &PhoneticCode, b: &PhoneticCode) -> usize {
    a.codes()
        .flat_map(|x| b.codes().map(move |y| dl_distance(x, y)))
        .min()
        .unwrap_or(0)
}

/// All lexicon forms within spelling distance 2 or phonetic-code distance 1
/// of `misspelling`, annotated with distances, vocabulary status and
/// frequency. Fails if the misspelling is itself a lexicon word.
pub fn generate_candidates<T: Scalar>(
    misspelling: &str,
    lexicon: &Lexicon,
    index: &PhoneticIndex,
    freqs: &FrequencyTable,
    store: &EmbeddingStore<T>,
) -> Result<Vec<Candidate>> {
    if lexicon.contains(misspelling) {
        return Err(Error::Contract(format!(
            "{misspelling:?} is in the lexicon; only non-words get candidates"
        )));
    }
    let mut found: BTreeMap<Arc<str>, Option<usize>> = BTreeMap::new();

    let mut matcher = BoundedMatcher::new(misspelling);
    let len = matcher.query_len();
    for form in lexicon.with_len_between(len.saturating_sub(SPELLING_RADIUS), len + SPELLING_RADIUS) {
        if let Some(d) = matcher.within(form, SPELLING_RADIUS) {
            found.insert(form.clone(), Some(d));
        }
    }

    let code = double_metaphone(misspelling);
    for mcode in code.codes() {
        let mut code_matcher = BoundedMatcher::new(mcode);
        let clen = code_matcher.query_len();
        let lo = clen.saturating_sub(PHONETIC_RADIUS);
        for (_, codes) in index.codes_by_len.range(lo..=clen + PHONETIC_RADIUS) {
            for c in codes {
                if code_matcher.within(c, PHONETIC_RADIUS).is_none() {
                    continue;
                }
                for form in &index.by_code[c] {
                    // Index entries may predate the lexicon passed in.
                    if let Some(shared) = lexicon.get_shared(form) {
                        found.entry(shared.clone()).or_insert(None);
                    }
                }
            }
        }
    }

    Ok(found
        .into_iter()
        .map(|(form, dl)| {
            let dl = dl.unwrap_or_else(|| dl_distance(misspelling, &form));
            Candidate {
                dm_dl: code_distance(&index.code_for(&form), &code),
                in_embedding_vocab: store.has_word(&form),
                frequency: freqs.get(&form),
                form: form.to_string(),
                dl,
            }
        })
        .collect())
}

/// Applies a [`CandidatePolicy`] to a generated set.
pub fn apply_policy(candidates: Vec<Candidate>, policy: CandidatePolicy) -> Vec<Candidate> {
    match policy {
        CandidatePolicy::All => candidates,
        CandidatePolicy::InVocabOnly => candidates.into_iter().filter(|c| c.in_embedding_vocab).collect(),
    }
}
