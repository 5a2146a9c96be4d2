//! Context-sensitive spelling correction for noisy domain text.
//!
//! Candidates come from edit distance and Double Metaphone matching over a
//! lexicon; they are ranked by how well their embedding fits the
//! surrounding words, or by a frequency-driven noisy-channel baseline. The
//! crate also builds self-induced error corpora and evaluates rankers on
//! them.
//!
//! Vector arithmetic is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the common choices.

pub mod candidates;
pub mod corpus;
pub mod edit_distance;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod lexicon;
pub mod phonetics;
pub mod rankers;
pub mod scalar;
pub mod text_norm;
mod textio;

pub use candidates::{apply_policy, generate_candidates, Candidate, CandidateGenerator, CandidatePolicy, PhoneticIndex};
pub use corpus::{
    detect_misspellings, generate_corpus, induce_error, read_instances, write_instances, Alphabet, EditOp, ErrorSpec,
    InducedError, SetupFilter,
};
pub use edit_distance::{dl_distance, dl_within, BoundedMatcher};
pub use embedding::{cosine, extract_ngrams, EmbeddingStore, FrequencyTable, WordVector};
pub use error::{Error, Result};
pub use eval::{
    evaluate, evaluate_prepared, grid_search, rel_freq_bin, tune_oov_penalty, EvalMode, EvalReport, GridResult,
    GridSpace, OovTuning, PreparedCorpus, RelFreqBin, ReportEnvelope,
};
pub use lexicon::Lexicon;
pub use phonetics::{double_metaphone, PhoneticCode};
pub use rankers::{
    compose_context, rank_context, rank_noisy_channel, score_candidate, spell_score, Composition, ContextRanker,
    EditPenalty, Lang, MisspellingInstance, NoisyChannelRanker, RankedList, Ranker, RankingConfig, Stopwords,
};
pub use scalar::Scalar;
pub use text_norm::{tokenize_line, Token};

pub type EmbeddingStoreF32 = EmbeddingStore<f32>;
pub type EmbeddingStoreF64 = EmbeddingStore<f64>;
pub type ContextRankerF32<'a> = ContextRanker<'a, f32>;
pub type ContextRankerF64<'a> = ContextRanker<'a, f64>;
