//! Self-induced error corpora and low-frequency misspelling detection.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::edit_distance::dl_distance;
use crate::embedding::EmbeddingStore;
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::rankers::{MisspellingInstance, MAX_CONTEXT};
use crate::scalar::Scalar;
use crate::text_norm::{is_normalized, tokenize_line};
use crate::textio::{read_lines, write_string};

pub const DEFAULT_ONE_OP_SHARE: f64 = 0.8;
pub const DEFAULT_MAX_ATTEMPTS: usize = 100;
pub const DEFAULT_FREQ_CAP: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditOp {
    Insert,
    Delete,
    Substitute,
    Transpose,
}

impl EditOp {
    pub const ALL: [EditOp; 4] = [EditOp::Insert, EditOp::Delete, EditOp::Substitute, EditOp::Transpose];
}

/// Characters available to insertions and substitutions.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alphabet {
    /// Letters observed in the corpus plus the hyphen. Outside
    /// [`generate_corpus`] this means `a-z` plus the hyphen.
    #[default]
    FromCorpus,
    Fixed(Vec<char>),
}

impl Alphabet {
    pub fn latin() -> Vec<char> {
        ('a'..='z').chain(['-']).collect()
    }

    /// Sorted distinct characters of all tokens, plus the hyphen.
    pub fn observed<'a>(tokens: impl IntoIterator<Item = &'a str>) -> Alphabet {
        let mut set: BTreeSet<char> = tokens.into_iter().flat_map(str::chars).collect();
        set.insert('-');
        Alphabet::Fixed(set.into_iter().collect())
    }

    fn chars(&self) -> Vec<char> {
        match self {
            Alphabet::FromCorpus => Alphabet::latin(),
            Alphabet::Fixed(c) => c.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSpec {
    /// Probability of a single edit; otherwise two.
    pub one_op_share: f64,
    /// Weights for insert, delete, substitute, transpose.
    pub op_mix: [f64; 4],
    pub alphabet: Alphabet,
    pub max_attempts: usize,
}

impl Default for ErrorSpec {
    fn default() -> Self {
        Self {
            one_op_share: DEFAULT_ONE_OP_SHARE,
            op_mix: [1.0; 4],
            alphabet: Alphabet::FromCorpus,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }
}

impl ErrorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.one_op_share) {
            return Err(Error::Contract(format!("one-op share {} outside [0, 1]", self.one_op_share)));
        }
        if let Alphabet::Fixed(c) = &self.alphabet {
            if c.is_empty() {
                return Err(Error::Contract("empty alphabet".into()));
            }
        }
        if self.max_attempts == 0 {
            return Err(Error::Contract("max attempts must be positive".into()));
        }
        WeightedIndex::new(self.op_mix).map_err(|e| Error::Contract(format!("bad op mix: {e}")))?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedError {
    pub misspelling: String,
    pub n_ops: usize,
    pub ops: Vec<EditOp>,
}

fn apply_op<R: Rng>(word: &mut Vec<char>, op: EditOp, alphabet: &[char], rng: &mut R) -> bool {
    match op {
        EditOp::Insert => {
            let pos = rng.gen_range(0..=word.len());
            word.insert(pos, *alphabet.choose(rng).expect("non-empty alphabet"));
        }
        EditOp::Delete => {
            if word.is_empty() {
                return false;
            }
            word.remove(rng.gen_range(0..word.len()));
        }
        EditOp::Substitute => {
            if word.is_empty() {
                return false;
            }
            let pos = rng.gen_range(0..word.len());
            let choices: Vec<char> = alphabet.iter().copied().filter(|&c| c != word[pos]).collect();
            let Some(&c) = choices.choose(rng) else {
                return false;
            };
            word[pos] = c;
        }
        EditOp::Transpose => {
            let spots: Vec<usize> = (0..word.len().saturating_sub(1))
                .filter(|&i| word[i] != word[i + 1])
                .collect();
            let Some(&i) = spots.choose(rng) else {
                return false;
            };
            word.swap(i, i + 1);
        }
    }
    true
}

/// Corrupts a lexicon word into a non-word with one or two random edits.
///
/// The number of edits is drawn once; the edits themselves are redrawn until
/// the result is a normalized non-word at exactly that distance.
pub fn induce_error<R: Rng>(word: &str, spec: &ErrorSpec, lexicon: &Lexicon, rng: &mut R) -> Result<InducedError> {
    spec.validate()?;
    if !lexicon.contains(word) || !is_normalized(word) {
        return Err(Error::Contract(format!("{word:?} is not a lexicon form")));
    }
    let original: Vec<char> = word.chars().collect();
    if original.len() < 2 {
        return Err(Error::Contract(format!("{word:?} is shorter than two characters")));
    }
    let alphabet = spec.alphabet.chars();
    let op_dist = WeightedIndex::new(spec.op_mix).expect("validated");
    let n_ops = if rng.gen_bool(spec.one_op_share) { 1 } else { 2 };
    'attempt: for _ in 0..spec.max_attempts {
        let mut w = original.clone();
        let mut ops = Vec::with_capacity(n_ops);
        for _ in 0..n_ops {
            let op = EditOp::ALL[op_dist.sample(rng)];
            if !apply_op(&mut w, op, &alphabet, rng) {
                continue 'attempt;
            }
            ops.push(op);
        }
        let candidate: String = w.into_iter().collect();
        if is_normalized(&candidate) && dl_distance(word, &candidate) == n_ops && !lexicon.contains(&candidate) {
            return Ok(InducedError {
                misspelling: candidate,
                n_ops,
                ops,
            });
        }
    }
    Err(Error::InductionExhausted {
        word: word.to_string(),
        attempts: spec.max_attempts,
    })
}

/// [`induce_error`] with a fresh generator seeded from `seed`.
pub fn induce_error_seeded(word: &str, spec: &ErrorSpec, lexicon: &Lexicon, seed: u64) -> Result<InducedError> {
    induce_error(word, spec, lexicon, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Which gold words a generated corpus may contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetupFilter {
    /// Golds with their own word vector.
    InVectorVocab,
    /// Golds without one.
    OovOnly,
}

impl SetupFilter {
    /// Setups 1 and 2 sample in-vocabulary golds, setup 3 OOV golds.
    pub fn for_setup(setup: u8) -> Result<Self> {
        match setup {
            1 | 2 => Ok(SetupFilter::InVectorVocab),
            3 => Ok(SetupFilter::OovOnly),
            _ => Err(Error::Contract(format!("setup must be 1, 2 or 3, got {setup}"))),
        }
    }

    pub fn admits<T: Scalar>(self, word: &str, store: &EmbeddingStore<T>) -> bool {
        match self {
            SetupFilter::InVectorVocab => store.has_word(word),
            SetupFilter::OovOnly => !store.has_word(word),
        }
    }
}

fn context(tokens: &[String], i: usize) -> (Vec<String>, Vec<String>) {
    let left = tokens[i.saturating_sub(MAX_CONTEXT)..i].to_vec();
    let right = tokens[i + 1..tokens.len().min(i + 1 + MAX_CONTEXT)].to_vec();
    (left, right)
}

fn tokenize_all(lines: &[String]) -> Vec<Vec<String>> {
    lines
        .iter()
        .map(|l| tokenize_line(l).into_iter().map(|t| t.into_string()).collect())
        .collect()
}

/// Builds `target` misspelling instances from the lines of a corpus file.
/// See [`generate_from_lines`].
pub fn generate_corpus<T: Scalar>(
    corpus_path: &Path,
    lexicon: &Lexicon,
    store: &EmbeddingStore<T>,
    filter: SetupFilter,
    target: usize,
    spec: &ErrorSpec,
    seed: u64,
) -> Result<Vec<MisspellingInstance>> {
    let lines = read_lines(corpus_path)?;
    generate_from_lines(&lines, lexicon, store, filter, target, spec, seed)
}

/// Visits lines in a seeded random order; from each, picks one eligible
/// token uniformly (a lexicon form of at least two characters admitted by
/// `filter`) and corrupts it. Lines without an eligible token, or whose
/// token resists corruption, are skipped. Fails with
/// [`Error::CorpusExhausted`] if the lines run out before `target`.
pub fn generate_from_lines<T: Scalar>(
    lines: &[String],
    lexicon: &Lexicon,
    store: &EmbeddingStore<T>,
    filter: SetupFilter,
    target: usize,
    spec: &ErrorSpec,
    seed: u64,
) -> Result<Vec<MisspellingInstance>> {
    spec.validate()?;
    let tokenized = tokenize_all(lines);
    let mut spec = spec.clone();
    if spec.alphabet == Alphabet::FromCorpus {
        spec.alphabet = Alphabet::observed(tokenized.iter().flatten().map(String::as_str));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..tokenized.len()).collect();
    order.shuffle(&mut rng);

    let mut out = Vec::with_capacity(target);
    for li in order {
        if out.len() == target {
            break;
        }
        let tokens = &tokenized[li];
        let eligible: Vec<usize> = (0..tokens.len())
            .filter(|&i| {
                let t = &tokens[i];
                t.chars().count() >= 2 && lexicon.contains(t) && filter.admits(t, store)
            })
            .collect();
        let Some(&i) = eligible.choose(&mut rng) else {
            continue;
        };
        let gold = &tokens[i];
        let induced = match induce_error(gold, &spec, lexicon, &mut rng) {
            Ok(e) => e,
            Err(Error::InductionExhausted { .. }) => continue,
            Err(e) => return Err(e),
        };
        let (left, right) = context(tokens, i);
        out.push(MisspellingInstance::new(left, induced.misspelling, right, Some(gold.clone()))?);
    }
    if out.len() < target {
        return Err(Error::CorpusExhausted {
            achieved: out.len(),
            target,
        });
    }
    Ok(out)
}

/// Every occurrence of a token whose whole-corpus frequency is at most
/// `freq_cap` and which is not in the lexicon, in corpus order, without gold.
pub fn detect_misspellings(corpus_path: &Path, lexicon: &Lexicon, freq_cap: u64) -> Result<Vec<MisspellingInstance>> {
    Ok(detect_in_lines(&read_lines(corpus_path)?, lexicon, freq_cap))
}

pub fn detect_in_lines(lines: &[String], lexicon: &Lexicon, freq_cap: u64) -> Vec<MisspellingInstance> {
    let tokenized = tokenize_all(lines);
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for t in tokenized.iter().flatten() {
        *counts.entry(t).or_default() += 1;
    }
    let mut out = Vec::new();
    for tokens in &tokenized {
        for (i, t) in tokens.iter().enumerate() {
            if counts[t.as_str()] <= freq_cap && !lexicon.contains(t) {
                let (left, right) = context(tokens, i);
                out.push(MisspellingInstance {
                    left,
                    misspelling: t.clone(),
                    right,
                    gold: None,
                });
            }
        }
    }
    out
}

/// One instance per line: left context, misspelling, gold (possibly
/// empty), right context; contexts are space-joined.
pub fn format_instances(instances: &[MisspellingInstance]) -> String {
    let mut out = String::new();
    for inst in instances {
        out.push_str(&inst.left.join(" "));
        out.push('\t');
        out.push_str(&inst.misspelling);
        out.push('\t');
        out.push_str(inst.gold.as_deref().unwrap_or(""));
        out.push('\t');
        out.push_str(&inst.right.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_instances(path: &Path, instances: &[MisspellingInstance]) -> Result<()> {
    write_string(path, &format_instances(instances))
}

pub fn read_instances(path: &Path) -> Result<Vec<MisspellingInstance>> {
    let split = |s: &str| -> Vec<String> { s.split(' ').filter(|t| !t.is_empty()).map(str::to_string).collect() };
    read_lines(path)?
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(n, line)| {
            let cols: Vec<&str> = line.split('\t').collect();
            let [left, miss, gold, right] = cols[..] else {
                return Err(Error::format(path, n + 1, format!("expected 4 tab-separated columns, got {}", cols.len())));
            };
            let gold = (!gold.is_empty()).then(|| gold.to_string());
            MisspellingInstance::new(split(left), miss, split(right), gold)
                .map_err(|e| Error::format(path, n + 1, e.to_string()))
        })
        .collect()
}
