//! Candidate ranking: the context-sensitive embedding model and the
//! noisy-channel baseline.
//!
//! The context model composes the vectors of the words around a misspelling
//! (optionally weighted by 1/distance), takes the cosine with each
//! candidate's vector, clamps it at zero and divides by an edit-distance
//! penalty, and by a further OOV penalty when the candidate's vector had to
//! be composed from n-grams. The noisy channel ignores context: add-one
//! smoothed corpus prior times a spell-score likelihood.
//!
//! Both rankers share one tie-break chain: lower edit distance, then higher
//! corpus frequency, then lexicographic order of the form.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::candidates::Candidate;
use crate::embedding::{cosine, EmbeddingStore, FrequencyTable};
use crate::error::{Error, Result};
use crate::phonetics::double_metaphone;
use crate::scalar::Scalar;
use crate::text_norm::{is_normalized, tokenize_line};
use crate::textio::read_lines;

/// Most context tokens kept on either side of a misspelling.
pub const MAX_CONTEXT: usize = 10;

pub const DEFAULT_OOV_PENALTY: f64 = 2.0;
pub const DEFAULT_SPELL_LAMBDA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MisspellingInstance {
    /// Tokens before the misspelling, nearest last.
    pub left: Vec<String>,
    pub misspelling: String,
    /// Tokens after the misspelling, nearest first.
    pub right: Vec<String>,
    pub gold: Option<String>,
}

impl MisspellingInstance {
    pub fn new(
        left: Vec<String>,
        misspelling: impl Into<String>,
        right: Vec<String>,
        gold: Option<String>,
    ) -> Result<Self> {
        let misspelling = misspelling.into();
        if !is_normalized(&misspelling) {
            return Err(Error::Contract(format!("misspelling {misspelling:?} is not a normalized token")));
        }
        if left.len() > MAX_CONTEXT || right.len() > MAX_CONTEXT {
            return Err(Error::Contract(format!(
                "context of {misspelling:?} exceeds {MAX_CONTEXT} tokens per side"
            )));
        }
        Ok(Self {
            left,
            misspelling,
            right,
            gold,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Composition {
    Addition,
    Multiplication,
    /// Elementwise maximum.
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditPenalty {
    /// Divide by the spelling edit distance.
    Dl,
    /// Divide by the phonetic-code edit distance plus one.
    Dm,
    /// Divide by the sum of both distances.
    DlPlusDm,
    /// Multiply by the spell score instead of dividing.
    SpellScore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lang {
    #[default]
    En,
    Nl,
}

macro_rules! impl_keyword_enum {
    ($ty:ty { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub const ALL: &'static [$ty] = &[$(<$ty>::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $(<$ty>::$variant => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(<$ty>::$variant),)+
                    _ => Err(Error::Contract(format!(
                        concat!("unknown ", stringify!($ty), " {:?} (expected one of: {})"),
                        s,
                        [$($name),+].join(", ")
                    ))),
                }
            }
        }
    };
}

impl_keyword_enum!(Composition { Addition => "addition", Multiplication => "multiplication", Max => "max" });
impl_keyword_enum!(EditPenalty { Dl => "dl", Dm => "dm", DlPlusDm => "dl_plus_dm", SpellScore => "spell_score" });
impl_keyword_enum!(Lang { En => "en", Nl => "nl" });

impl Lang {
    pub fn default_window(self) -> usize {
        match self {
            Lang::En => 9,
            Lang::Nl => 10,
        }
    }
}

/// Every knob of the context model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingConfig {
    pub window: usize,
    pub composition: Composition,
    pub reciprocal_weighting: bool,
    pub remove_stopwords: bool,
    pub include_misspelling_vector: bool,
    pub edit_penalty: EditPenalty,
    pub oov_penalty: f64,
    /// Weight of the spelling term in the spell score.
    pub spell_lambda: f64,
}

impl RankingConfig {
    pub fn for_lang(lang: Lang) -> Self {
        Self {
            window: lang.default_window(),
            composition: Composition::Addition,
            reciprocal_weighting: true,
            remove_stopwords: true,
            include_misspelling_vector: false,
            edit_penalty: EditPenalty::Dl,
            oov_penalty: DEFAULT_OOV_PENALTY,
            spell_lambda: DEFAULT_SPELL_LAMBDA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_CONTEXT).contains(&self.window) {
            return Err(Error::Contract(format!("window {} outside 1..={MAX_CONTEXT}", self.window)));
        }
        if !(self.oov_penalty >= 1.0 && self.oov_penalty.is_finite()) {
            return Err(Error::Contract(format!("oov penalty {} must be >= 1", self.oov_penalty)));
        }
        if !(0.0..=1.0).contains(&self.spell_lambda) {
            return Err(Error::Contract(format!("spell lambda {} outside [0, 1]", self.spell_lambda)));
        }
        Ok(())
    }
}

impl Default for RankingConfig {
    fn default() -> Self {
        Self::for_lang(Lang::En)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self(
            words
                .into_iter()
                .flat_map(|w| tokenize_line(w.as_ref()))
                .map(|t| t.into_string())
                .collect(),
        )
    }

    /// One stopword per line.
    pub fn load(path: &Path) -> Result<Self> {
        Ok(Self::from_words(read_lines(path)?))
    }

    pub fn builtin(lang: Lang) -> Self {
        let text = match lang {
            Lang::En => include_str!("../data/stopwords/en.txt"),
            Lang::Nl => include_str!("../data/stopwords/nl.txt"),
        };
        Self::from_words(text.lines())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Which rule separated an entry from the one ranked directly below it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    Score,
    EditDistance,
    Frequency,
    Lexicographic,
    /// Same form twice; should not happen with deduplicated candidates.
    Identical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCandidate {
    pub candidate: Candidate,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    /// Best first; scores are non-increasing.
    pub entries: Vec<RankedCandidate>,
    /// `tie_break_trace[i]` separates `entries[i]` from `entries[i + 1]`.
    pub tie_break_trace: Vec<TieRule>,
    /// Set when no context vector existed and the order is purely the
    /// fallback chain.
    pub fallback: bool,
}

impl RankedList {
    fn build(scored: Vec<(Candidate, f64)>, fallback: bool) -> Self {
        let mut scored = scored;
        scored.sort_by(|(a, sa), (b, sb)| sb.total_cmp(sa).then_with(|| fallback_order(a, b)));
        let tie_break_trace = scored
            .windows(2)
            .map(|w| separating_rule(&w[0], &w[1]))
            .collect();
        Self {
            entries: scored
                .into_iter()
                .map(|(candidate, score)| RankedCandidate { candidate, score })
                .collect(),
            tie_break_trace,
            fallback,
        }
    }

    pub fn best(&self) -> &Candidate {
        &self.entries[0].candidate
    }

    pub fn forms(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.candidate.form.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Lower edit distance, then higher frequency, then lexicographic form.
pub fn fallback_order(a: &Candidate, b: &Candidate) -> Ordering {
    a.dl.cmp(&b.dl)
        .then_with(|| b.frequency.cmp(&a.frequency))
        .then_with(|| a.form.cmp(&b.form))
}

fn separating_rule((a, sa): &(Candidate, f64), (b, sb): &(Candidate, f64)) -> TieRule {
    if sa != sb {
        TieRule::Score
    } else if a.dl != b.dl {
        TieRule::EditDistance
    } else if a.frequency != b.frequency {
        TieRule::Frequency
    } else if a.form != b.form {
        TieRule::Lexicographic
    } else {
        TieRule::Identical
    }
}

fn fold_into<T: Scalar>(acc: &mut Option<Vec<T>>, v: &[T], weight: T, how: Composition) {
    match acc {
        None => *acc = Some(v.iter().map(|&x| x * weight).collect()),
        Some(acc) => {
            for (a, &x) in acc.iter_mut().zip(v) {
                let x = x * weight;
                *a = match how {
                    Composition::Addition => *a + x,
                    Composition::Multiplication => *a * x,
                    Composition::Max => a.max(x),
                };
            }
        }
    }
}

/// Composes the context vector of an instance, or `None` when no context
/// token (nor the misspelling, if included) has a usable vector.
///
/// Context tokens must have their own word vector; distances count original
/// positions, so skipped tokens still push later ones further away.
pub fn compose_context<T: Scalar>(
    instance: &MisspellingInstance,
    config: &RankingConfig,
    store: &EmbeddingStore<T>,
    stopwords: &Stopwords,
) -> Option<Vec<T>> {
    let mut acc: Option<Vec<T>> = None;
    let left = instance.left.iter().rev().take(config.window);
    let right = instance.right.iter().take(config.window);
    for side in [left.collect::<Vec<_>>(), right.collect::<Vec<_>>()] {
        for (offset, tok) in side.into_iter().enumerate() {
            if config.remove_stopwords && stopwords.contains(tok) {
                continue;
            }
            let Some(v) = store.word_vector(tok) else {
                continue;
            };
            let weight = if config.reciprocal_weighting {
                T::one() / T::from_usize(offset + 1).expect("small integer")
            } else {
                T::one()
            };
            fold_into(&mut acc, v, weight, config.composition);
        }
    }
    if config.include_misspelling_vector {
        if let Some(v) = store.vector_for(&instance.misspelling) {
            fold_into(&mut acc, &v.vector, T::one(), config.composition);
        }
    }
    acc
}

/// `λ·(1 − dl/maxlen) + (1 − λ)·(1 − dm_dl/max_code_len)`, each term clamped
/// to `[0, 1]`. Lengths are in characters; code lengths use primary codes.
pub fn spell_score(candidate: &Candidate, misspelling: &str, lambda: f64) -> f64 {
    let miss_len = misspelling.chars().count();
    let miss_code_len = double_metaphone(misspelling).primary.len();
    spell_score_with(candidate, miss_len, miss_code_len, lambda)
}

fn spell_score_with(candidate: &Candidate, miss_len: usize, miss_code_len: usize, lambda: f64) -> f64 {
    let ratio_term = |dist: usize, max: usize| {
        if max == 0 {
            1.0
        } else {
            (1.0 - dist as f64 / max as f64).clamp(0.0, 1.0)
        }
    };
    let max_len = candidate.form.chars().count().max(miss_len);
    let max_code_len = double_metaphone(&candidate.form).primary.len().max(miss_code_len);
    lambda * ratio_term(candidate.dl, max_len) + (1.0 - lambda) * ratio_term(candidate.dm_dl, max_code_len)
}

/// Scores one candidate against a context vector. `None` when the candidate
/// has no vector, not even a composed one.
pub fn score_candidate<T: Scalar>(
    candidate: &Candidate,
    misspelling: &str,
    context: &[T],
    config: &RankingConfig,
    store: &EmbeddingStore<T>,
) -> Result<Option<f64>> {
    let Some(cv) = store.vector_for(&candidate.form) else {
        return Ok(None);
    };
    let sim = cosine(&cv.vector, context)?.max(T::zero()).as_f64();
    let mut score = match config.edit_penalty {
        EditPenalty::Dl => sim / candidate.dl.max(1) as f64,
        EditPenalty::Dm => sim / (candidate.dm_dl + 1) as f64,
        EditPenalty::DlPlusDm => sim / (candidate.dl + candidate.dm_dl).max(1) as f64,
        EditPenalty::SpellScore => sim * spell_score(candidate, misspelling, config.spell_lambda),
    };
    if !cv.in_vocab {
        score /= config.oov_penalty;
    }
    Ok(Some(score))
}

/// Ranks candidates by context fit. Candidates without any vector score 0;
/// without a context vector every score is 0 and the fallback chain decides.
pub fn rank_context<T: Scalar>(
    instance: &MisspellingInstance,
    candidates: &[Candidate],
    config: &RankingConfig,
    store: &EmbeddingStore<T>,
    stopwords: &Stopwords,
) -> Result<RankedList> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates(instance.misspelling.clone()));
    }
    let Some(context) = compose_context(instance, config, store, stopwords) else {
        let scored = candidates.iter().map(|c| (c.clone(), 0.0)).collect();
        return Ok(RankedList::build(scored, true));
    };
    let scored = candidates
        .iter()
        .map(|c| {
            let s = score_candidate(c, &instance.misspelling, &context, config, store)?;
            Ok((c.clone(), s.unwrap_or(0.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RankedList::build(scored, false))
}

/// Add-one smoothed prior times spell score; context is never consulted.
pub fn rank_noisy_channel(
    instance: &MisspellingInstance,
    candidates: &[Candidate],
    freqs: &FrequencyTable,
    lambda: f64,
) -> Result<RankedList> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates(instance.misspelling.clone()));
    }
    let miss_len = instance.misspelling.chars().count();
    let miss_code_len = double_metaphone(&instance.misspelling).primary.len();
    let denom = (freqs.total() + freqs.vocab_size() as u64) as f64;
    let scored = candidates
        .iter()
        .map(|c| {
            let prior = (c.frequency as f64 + 1.0) / denom.max(1.0);
            (c.clone(), prior * spell_score_with(c, miss_len, miss_code_len, lambda))
        })
        .collect();
    Ok(RankedList::build(scored, false))
}

/// A ranking function over generated candidates.
pub trait Ranker: Sync {
    fn name(&self) -> &'static str;

    fn rank(&self, instance: &MisspellingInstance, candidates: &[Candidate]) -> Result<RankedList>;
}

#[derive(Debug, Clone)]
pub struct ContextRanker<'a, T: Scalar> {
    pub store: &'a EmbeddingStore<T>,
    pub stopwords: &'a Stopwords,
    pub config: RankingConfig,
}

impl<'a, T: Scalar> ContextRanker<'a, T> {
    pub fn new(store: &'a EmbeddingStore<T>, stopwords: &'a Stopwords, config: RankingConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            store,
            stopwords,
            config,
        })
    }
}

impl<T: Scalar> Ranker for ContextRanker<'_, T> {
    fn name(&self) -> &'static str {
        "context"
    }

    fn rank(&self, instance: &MisspellingInstance, candidates: &[Candidate]) -> Result<RankedList> {
        rank_context(instance, candidates, &self.config, self.store, self.stopwords)
    }
}

#[derive(Debug, Clone)]
pub struct NoisyChannelRanker<'a> {
    pub freqs: &'a FrequencyTable,
    pub spell_lambda: f64,
}

impl<'a> NoisyChannelRanker<'a> {
    pub fn new(freqs: &'a FrequencyTable) -> Self {
        Self {
            freqs,
            spell_lambda: DEFAULT_SPELL_LAMBDA,
        }
    }
}

impl Ranker for NoisyChannelRanker<'_> {
    fn name(&self) -> &'static str {
        "noisy"
    }

    fn rank(&self, instance: &MisspellingInstance, candidates: &[Candidate]) -> Result<RankedList> {
        rank_noisy_channel(instance, candidates, self.freqs, self.spell_lambda)
    }
}
