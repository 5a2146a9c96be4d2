//! First-best accuracy, relative-frequency bins, grid search and OOV
//! penalty tuning.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::candidates::{apply_policy, Candidate, CandidateGenerator, CandidatePolicy};
use crate::embedding::{EmbeddingStore, FrequencyTable};
use crate::error::{Error, Result};
use crate::rankers::{
    Composition, ContextRanker, EditPenalty, MisspellingInstance, Ranker, RankingConfig, Stopwords, MAX_CONTEXT,
};
use crate::scalar::Scalar;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    #[default]
    True,
    /// Gold forms are added to the lexicon before candidate generation.
    UpperBound,
}

impl std::str::FromStr for EvalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "true" => Ok(EvalMode::True),
            "upper_bound" | "upper-bound" => Ok(EvalMode::UpperBound),
            _ => Err(Error::Contract(format!("unknown mode {s:?} (expected true or upper_bound)"))),
        }
    }
}

/// Rank of the gold's corpus frequency among the candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelFreqBin {
    #[serde(rename = "relfreq_1")]
    First,
    #[serde(rename = "relfreq_2")]
    Second,
    #[serde(rename = "relfreq_gt2")]
    Lower,
}

/// `None` when the gold is not a candidate. Tied frequencies share the
/// better rank: the rank is one plus the number of candidates strictly more
/// frequent than the gold.
pub fn rel_freq_bin(gold: &str, candidates: &[Candidate]) -> Option<RelFreqBin> {
    let g = candidates.iter().find(|c| c.form == gold)?.frequency;
    let above = candidates.iter().filter(|c| c.frequency > g).count();
    Some(match above {
        0 => RelFreqBin::First,
        1 => RelFreqBin::Second,
        _ => RelFreqBin::Lower,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BinStats {
    pub count: usize,
    pub correct: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PerBin {
    pub relfreq_1: BinStats,
    pub relfreq_2: BinStats,
    pub relfreq_gt2: BinStats,
}

impl PerBin {
    pub fn get(&self, bin: RelFreqBin) -> &BinStats {
        match bin {
            RelFreqBin::First => &self.relfreq_1,
            RelFreqBin::Second => &self.relfreq_2,
            RelFreqBin::Lower => &self.relfreq_gt2,
        }
    }

    fn get_mut(&mut self, bin: RelFreqBin) -> &mut BinStats {
        match bin {
            RelFreqBin::First => &mut self.relfreq_1,
            RelFreqBin::Second => &mut self.relfreq_2,
            RelFreqBin::Lower => &mut self.relfreq_gt2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mode: EvalMode,
    pub ranker: String,
    pub total: usize,
    pub correct_first: usize,
    /// Percentage.
    pub accuracy: f64,
    pub per_bin: PerBin,
    /// Instances whose gold was not among the candidates.
    pub excluded_from_bins: usize,
    /// Instances with no candidates (including misspellings found in the
    /// lexicon).
    pub no_candidate_count: usize,
}

fn pct(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

/// An instance with its candidate set computed once.
#[derive(Debug, Clone)]
pub struct PreparedInstance {
    pub instance: MisspellingInstance,
    pub gold: String,
    pub candidates: Vec<Candidate>,
    pub bin: Option<RelFreqBin>,
}

/// A corpus with candidates generated for one mode and policy; ranking
/// configurations can then be swept without regenerating.
#[derive(Debug, Clone)]
pub struct PreparedCorpus {
    pub mode: EvalMode,
    pub policy: CandidatePolicy,
    pub items: Vec<PreparedInstance>,
}

impl PreparedCorpus {
    pub fn new<T: Scalar>(
        instances: &[MisspellingInstance],
        generator: &CandidateGenerator,
        mode: EvalMode,
        policy: CandidatePolicy,
        freqs: &FrequencyTable,
        store: &EmbeddingStore<T>,
    ) -> Result<Self> {
        let golds = instances
            .iter()
            .enumerate()
            .map(|(i, inst)| {
                inst.gold
                    .clone()
                    .filter(|g| !g.is_empty())
                    .ok_or_else(|| Error::Contract(format!("instance {} ({:?}) has no gold correction", i + 1, inst.misspelling)))
            })
            .collect::<Result<Vec<_>>>()?;
        let augmented;
        let generator = match mode {
            EvalMode::True => generator,
            EvalMode::UpperBound => {
                augmented = generator.augmented(&golds);
                &augmented
            }
        };
        let items = instances
            .par_iter()
            .zip(golds)
            .map(|(inst, gold)| {
                let candidates = if generator.lexicon().contains(&inst.misspelling) {
                    Vec::new()
                } else {
                    apply_policy(generator.generate(&inst.misspelling, freqs, store)?, policy)
                };
                Ok(PreparedInstance {
                    bin: rel_freq_bin(&gold, &candidates),
                    instance: inst.clone(),
                    gold,
                    candidates,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { mode, policy, items })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Whether each instance's first-ranked form equals its gold; `None` for
/// instances without candidates.
pub fn first_best<R: Ranker + ?Sized>(corpus: &PreparedCorpus, ranker: &R) -> Result<Vec<Option<bool>>> {
    corpus
        .items
        .par_iter()
        .map(|item| {
            if item.candidates.is_empty() {
                return Ok(None);
            }
            let ranked = ranker.rank(&item.instance, &item.candidates)?;
            Ok(Some(ranked.best().form == item.gold))
        })
        .collect()
}

pub fn evaluate_prepared<R: Ranker + ?Sized>(corpus: &PreparedCorpus, ranker: &R) -> Result<EvalReport> {
    let outcomes = first_best(corpus, ranker)?;
    let mut per_bin = PerBin::default();
    let mut correct_first = 0;
    let mut excluded = 0;
    let mut no_candidate = 0;
    for (item, outcome) in corpus.items.iter().zip(&outcomes) {
        let Some(ok) = *outcome else {
            no_candidate += 1;
            continue;
        };
        correct_first += usize::from(ok);
        match item.bin {
            Some(bin) => {
                let s = per_bin.get_mut(bin);
                s.count += 1;
                s.correct += usize::from(ok);
            }
            None => excluded += 1,
        }
    }
    for bin in [RelFreqBin::First, RelFreqBin::Second, RelFreqBin::Lower] {
        let s = per_bin.get_mut(bin);
        s.accuracy = pct(s.correct, s.count);
    }
    let total = corpus.items.len();
    Ok(EvalReport {
        mode: corpus.mode,
        ranker: ranker.name().to_string(),
        total,
        correct_first,
        accuracy: pct(correct_first, total),
        per_bin,
        excluded_from_bins: excluded,
        no_candidate_count: no_candidate,
    })
}

/// Generates candidates and scores a ranker in one go.
#[allow(clippy::too_many_arguments)]
pub fn evaluate<T: Scalar, R: Ranker + ?Sized>(
    instances: &[MisspellingInstance],
    ranker: &R,
    generator: &CandidateGenerator,
    mode: EvalMode,
    policy: CandidatePolicy,
    freqs: &FrequencyTable,
    store: &EmbeddingStore<T>,
) -> Result<EvalReport> {
    let prepared = PreparedCorpus::new(instances, generator, mode, policy, freqs, store)?;
    evaluate_prepared(&prepared, ranker)
}

/// Axes of the parameter grid, enumerated in declaration order with the
/// last axis varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpace {
    pub compositions: Vec<Composition>,
    pub edit_penalties: Vec<EditPenalty>,
    pub windows: Vec<usize>,
    pub reciprocal_weighting: Vec<bool>,
    pub remove_stopwords: Vec<bool>,
    pub include_misspelling_vector: Vec<bool>,
}

impl GridSpace {
    /// All 3 × 4 × 10 × 2 × 2 × 2 = 960 combinations.
    pub fn full() -> Self {
        Self {
            compositions: Composition::ALL.to_vec(),
            edit_penalties: EditPenalty::ALL.to_vec(),
            windows: (1..=MAX_CONTEXT).collect(),
            reciprocal_weighting: vec![true, false],
            remove_stopwords: vec![true, false],
            include_misspelling_vector: vec![false, true],
        }
    }

    /// The single point of `config`.
    pub fn single(config: &RankingConfig) -> Self {
        Self {
            compositions: vec![config.composition],
            edit_penalties: vec![config.edit_penalty],
            windows: vec![config.window],
            reciprocal_weighting: vec![config.reciprocal_weighting],
            remove_stopwords: vec![config.remove_stopwords],
            include_misspelling_vector: vec![config.include_misspelling_vector],
        }
    }

    pub fn size(&self) -> usize {
        self.compositions.len()
            * self.edit_penalties.len()
            * self.windows.len()
            * self.reciprocal_weighting.len()
            * self.remove_stopwords.len()
            * self.include_misspelling_vector.len()
    }

    /// Every configuration, with unswept fields taken from `base`.
    pub fn configs(&self, base: &RankingConfig) -> Vec<RankingConfig> {
        let mut out = Vec::with_capacity(self.size());
        for &composition in &self.compositions {
            for &edit_penalty in &self.edit_penalties {
                for &window in &self.windows {
                    for &reciprocal_weighting in &self.reciprocal_weighting {
                        for &remove_stopwords in &self.remove_stopwords {
                            for &include_misspelling_vector in &self.include_misspelling_vector {
                                out.push(RankingConfig {
                                    composition,
                                    edit_penalty,
                                    window,
                                    reciprocal_weighting,
                                    remove_stopwords,
                                    include_misspelling_vector,
                                    ..base.clone()
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub config: RankingConfig,
    pub setup1_accuracy: f64,
    pub setup2_accuracy: f64,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub best: RankingConfig,
    pub best_mean_accuracy: f64,
    pub evaluated: usize,
    pub rows: Vec<GridRow>,
}

/// Index of the first maximum; NaN never wins.
fn first_argmax(values: impl IntoIterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        if !v.is_nan() && best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

fn accuracy_of<T: Scalar>(
    corpus: &PreparedCorpus,
    config: &RankingConfig,
    store: &EmbeddingStore<T>,
    stopwords: &Stopwords,
) -> Result<f64> {
    let ranker = ContextRanker::new(store, stopwords, config.clone())?;
    let outcomes = first_best(corpus, &ranker)?;
    Ok(pct(outcomes.iter().filter(|o| **o == Some(true)).count(), corpus.len()))
}

/// Evaluates the context ranker at every point of `space` on two
/// development corpora and keeps the configuration with the highest mean
/// accuracy; ties go to the earliest configuration.
pub fn grid_search<T: Scalar>(
    setup1: &PreparedCorpus,
    setup2: &PreparedCorpus,
    space: &GridSpace,
    base: &RankingConfig,
    store: &EmbeddingStore<T>,
    stopwords: &Stopwords,
) -> Result<GridResult> {
    if setup1.is_empty() || setup2.is_empty() {
        return Err(Error::Contract("grid search needs two non-empty corpora".into()));
    }
    if setup1.policy != CandidatePolicy::InVocabOnly || setup2.policy != CandidatePolicy::InVocabOnly {
        return Err(Error::Contract("grid search runs on in-vocabulary candidates only".into()));
    }
    let configs = space.configs(base);
    if configs.is_empty() {
        return Err(Error::Contract("empty parameter grid".into()));
    }
    let rows = configs
        .into_par_iter()
        .map(|config| {
            let a1 = accuracy_of(setup1, &config, store, stopwords)?;
            let a2 = accuracy_of(setup2, &config, store, stopwords)?;
            Ok(GridRow {
                config,
                setup1_accuracy: a1,
                setup2_accuracy: a2,
                mean_accuracy: (a1 + a2) / 2.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = first_argmax(rows.iter().map(|r| r.mean_accuracy)).expect("non-empty");
    Ok(GridResult {
        best: rows[best].config.clone(),
        best_mean_accuracy: rows[best].mean_accuracy,
        evaluated: rows.len(),
        rows,
    })
}

pub const DEFAULT_OOV_WEIGHTS: [f64; 3] = [0.25, 0.25, 0.5];

/// Non-negative weights scaled to sum to one.
pub fn normalize_weights(weights: [f64; 3]) -> Result<[f64; 3]> {
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || sum <= 0.0 {
        return Err(Error::Contract(format!("weights {weights:?} must be non-negative with a positive sum")));
    }
    Ok(weights.map(|w| w / sum))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OovRow {
    pub oov_penalty: f64,
    pub accuracies: [f64; 3],
    pub weighted_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OovTuning {
    pub best_penalty: f64,
    pub best_weighted_accuracy: f64,
    pub weights: [f64; 3],
    pub rows: Vec<OovRow>,
}

/// Picks the OOV penalty maximizing the weighted accuracy over three
/// corpora prepared with OOV candidates admitted. Ties go to the earliest
/// penalty in `grid`.
pub fn tune_oov_penalty<T: Scalar>(
    corpora: [&PreparedCorpus; 3],
    config: &RankingConfig,
    grid: &[f64],
    weights: [f64; 3],
    store: &EmbeddingStore<T>,
    stopwords: &Stopwords,
) -> Result<OovTuning> {
    if grid.is_empty() {
        return Err(Error::Contract("empty penalty grid".into()));
    }
    if let Some(p) = grid.iter().find(|p| !(**p >= 1.0 && p.is_finite())) {
        return Err(Error::Contract(format!("oov penalty {p} must be >= 1")));
    }
    if corpora.iter().any(|c| c.policy != CandidatePolicy::All) {
        return Err(Error::Contract("oov tuning needs corpora prepared with all candidates".into()));
    }
    if corpora.iter().any(|c| c.is_empty()) {
        return Err(Error::Contract("oov tuning needs three non-empty corpora".into()));
    }
    let weights = normalize_weights(weights)?;
    let rows = grid
        .par_iter()
        .map(|&oov_penalty| {
            let cfg = RankingConfig {
                oov_penalty,
                ..config.clone()
            };
            let mut accuracies = [0.0; 3];
            for (acc, corpus) in accuracies.iter_mut().zip(corpora) {
                *acc = accuracy_of(corpus, &cfg, store, stopwords)?;
            }
            let weighted_accuracy = accuracies.iter().zip(weights).map(|(a, w)| a * w).sum();
            Ok(OovRow {
                oov_penalty,
                accuracies,
                weighted_accuracy,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = first_argmax(rows.iter().map(|r| r.weighted_accuracy)).expect("non-empty");
    Ok(OovTuning {
        best_penalty: rows[best].oov_penalty,
        best_weighted_accuracy: rows[best].weighted_accuracy,
        weights,
        rows,
    })
}

/// Wrapper written around every report file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope<R> {
    pub tool_version: String,
    pub corpus_paths: Vec<PathBuf>,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub result: R,
}

impl<R: Serialize> ReportEnvelope<R> {
    pub fn new(corpus_paths: Vec<PathBuf>, seed: Option<u64>, config: serde_json::Value, result: R) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            corpus_paths,
            seed,
            config,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
