#![allow(dead_code)]

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use ctxspell::{double_metaphone, Candidate, EmbeddingStore, FrequencyTable, Lexicon};
use flate2::read::GzDecoder;

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

fn gunzip_to(src: &Path, dst: &Path) {
    let mut text = String::new();
    GzDecoder::new(std::fs::File::open(src).unwrap())
        .read_to_string(&mut text)
        .unwrap();
    std::fs::write(dst, text).unwrap();
}

/// The small real-data bundle: a general word list, fastText-style vectors
/// (dim 30, n-grams 3..=4) trained on ~9M tokens of software documentation,
/// its frequency table, and held-out corpus lines.
pub struct Rehearsal {
    pub dir: tempfile::TempDir,
    pub lexicon: Lexicon,
    pub store: EmbeddingStore<f32>,
    pub freqs: FrequencyTable,
    pub corpus_path: PathBuf,
    pub lines: Vec<String>,
}

pub fn rehearsal() -> &'static Rehearsal {
    static R: OnceLock<Rehearsal> = OnceLock::new();
    R.get_or_init(|| {
        let src = data_dir().join("rehearsal");
        let dir = tempfile::tempdir().unwrap();
        let p = |n: &str| dir.path().join(n);
        for name in ["words.vec", "ngrams.vec", "freqs.tsv", "lexicon.txt", "gen_corpus.txt"] {
            gunzip_to(&src.join(format!("{name}.gz")), &p(name));
        }
        let lexicon = Lexicon::load(&[p("lexicon.txt")]).unwrap();
        let store = EmbeddingStore::load(&p("words.vec"), Some(&p("ngrams.vec"))).unwrap();
        let freqs = FrequencyTable::load(&p("freqs.tsv")).unwrap();
        let lines = std::fs::read_to_string(p("gen_corpus.txt"))
            .unwrap()
            .lines()
            .map(str::to_string)
            .collect();
        Rehearsal {
            corpus_path: p("gen_corpus.txt"),
            dir,
            lexicon,
            store,
            freqs,
            lines,
        }
    })
}

/// Textbook full-matrix optimal string alignment distance.
pub fn osa_oracle(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                d[i][j] = d[i][j].min(d[i - 2][j - 2] + 1);
            }
        }
    }
    d[a.len()][b.len()]
}

/// Compares every lexicon form against the misspelling directly, no
/// bucketing, banding or code index.
pub fn naive_candidates<T: ctxspell::Scalar>(
    misspelling: &str,
    lexicon: &Lexicon,
    freqs: &FrequencyTable,
    store: &EmbeddingStore<T>,
) -> Vec<Candidate> {
    let mcode = double_metaphone(misspelling);
    let mcodes = [mcode.primary.clone(), mcode.alternate.clone()];
    let mut out = BTreeMap::new();
    for form in lexicon.iter() {
        let dl = osa_oracle(misspelling, form);
        let c = double_metaphone(form);
        let dm = [&c.primary, &c.alternate]
            .iter()
            .flat_map(|x| mcodes.iter().map(move |y| osa_oracle(x, y)))
            .min()
            .unwrap();
        if dl <= 2 || dm <= 1 {
            out.insert(
                form.to_string(),
                Candidate {
                    form: form.to_string(),
                    dl,
                    dm_dl: dm,
                    in_embedding_vocab: store.has_word(form),
                    frequency: freqs.get(form),
                },
            );
        }
    }
    out.into_values().collect()
}

/// (misspelling, gold, distractor): gold and distractor are each one edit
/// away from the misspelling.
pub const BIAS_TRIPLES: &[(&str, &str, &str)] = &[
    ("goint", "going", "point"),
    ("hane", "hand", "have"),
    ("cae", "car", "cat"),
    ("bame", "bake", "came"),
    ("cought", "cough", "caught"),
    ("lats", "lots", "last"),
    ("fead", "feed", "head"),
    ("wark", "walk", "work"),
    ("hoat", "boat", "heat"),
    ("sart", "start", "part"),
    ("pian", "pain", "plan"),
    ("nead", "need", "head"),
    ("rign", "ring", "sign"),
    ("baad", "bad", "bead"),
    ("tabel", "table", "label"),
    ("doag", "dog", "drag"),
    ("fite", "fire", "file"),
    ("mext", "next", "text"),
    ("rane", "rate", "lane"),
    ("hert", "heart", "hurt"),
    ("suger", "sugar", "super"),
    ("whem", "when", "them"),
    ("ane", "and", "one"),
    ("poket", "pocket", "poker"),
];

pub const CONTEXT_WORDS: &[&str] = &["anemia", "patient", "ward", "chronic", "fever", "nurse"];

pub struct BiasCase {
    pub misspelling: &'static str,
    pub gold: &'static str,
    pub distractor: &'static str,
    pub lexicon: Lexicon,
    pub store: EmbeddingStore<f64>,
    pub freqs: FrequencyTable,
}

/// A 3-dimensional store per triple: the context word and the gold point
/// the same way (up to a small tilt), the distractor is orthogonal to the
/// context; the distractor is a hundred times more frequent.
pub fn bias_cases() -> Vec<BiasCase> {
    BIAS_TRIPLES
        .iter()
        .enumerate()
        .map(|(k, &(misspelling, gold, distractor))| {
            let t = k as f64 * 0.25;
            let ctx = [t.cos(), t.sin(), 0.3];
            let gold_v = [t.cos() + 0.1, t.sin() - 0.05, 0.35];
            // orthogonal to ctx: cross product with the z axis
            let dis_v = [-t.sin(), t.cos(), 0.0];
            let mut store = EmbeddingStore::new(3, 3, 4).unwrap();
            store.add_word(CONTEXT_WORDS[k % CONTEXT_WORDS.len()], &ctx).unwrap();
            store.add_word(gold, &gold_v).unwrap();
            store.add_word(distractor, &dis_v).unwrap();
            BiasCase {
                misspelling,
                gold,
                distractor,
                lexicon: Lexicon::from_forms([gold, distractor]),
                store,
                freqs: FrequencyTable::from_counts([(gold, 10), (distractor, 1000)]),
            }
        })
        .collect()
}

/// A small random ranking problem: a store of dimension 3..=6 with a few
/// context words, an instance over them (plus an unknown token), and
/// candidates that are either in the word vocabulary or composable from
/// n-grams only.
pub struct RandomFixture {
    pub store: EmbeddingStore<f64>,
    pub instance: ctxspell::MisspellingInstance,
    pub candidates: Vec<Candidate>,
    pub config: ctxspell::RankingConfig,
}

pub fn random_fixture(seed: u64) -> RandomFixture {
    use ctxspell::{extract_ngrams, Composition, EditPenalty, MisspellingInstance, RankingConfig};
    use rand::{Rng, SeedableRng};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.gen_range(3..=6);
    let vec_of = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> { (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let mut store = EmbeddingStore::new(dim, 3, 3).unwrap();
    let ctx_words = ["alpha", "bravo", "delta", "echo", "golf"];
    for w in ctx_words {
        let v = vec_of(&mut rng);
        store.add_word(w, &v).unwrap();
    }
    let side = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<String> {
        let n = rng.gen_range(0..=4);
        (0..n)
            .map(|_| {
                if rng.gen_bool(0.15) {
                    "unknown".to_string()
                } else {
                    ctx_words[rng.gen_range(0..ctx_words.len())].to_string()
                }
            })
            .collect()
    };
    let left = side(&mut rng);
    let mut right = side(&mut rng);
    if left.is_empty() && right.is_empty() {
        right.push("alpha".into());
    }
    let instance = MisspellingInstance::new(left, "qzxv", right, None).unwrap();

    let n = rng.gen_range(2..=8);
    let mut candidates = Vec::new();
    for i in 0..n {
        let form = format!("cand{}", char::from(b'a' + i as u8));
        let in_vocab = rng.gen_bool(0.6);
        if in_vocab {
            let v = vec_of(&mut rng);
            store.add_word(&form, &v).unwrap();
        } else {
            for g in extract_ngrams(&form, 3, 3) {
                if store.ngram_vector(&g).is_none() {
                    let v = vec_of(&mut rng);
                    store.add_ngram(&g, &v).unwrap();
                }
            }
        }
        candidates.push(Candidate {
            form,
            dl: rng.gen_range(1..=3),
            dm_dl: rng.gen_range(0..=2),
            in_embedding_vocab: in_vocab,
            frequency: rng.gen_range(0..1000),
        });
    }
    let config = RankingConfig {
        window: rng.gen_range(1..=10),
        composition: Composition::ALL[rng.gen_range(0..3)],
        reciprocal_weighting: rng.gen_bool(0.5),
        remove_stopwords: false,
        include_misspelling_vector: false,
        edit_penalty: EditPenalty::ALL[rng.gen_range(0..4)],
        oov_penalty: rng.gen_range(1.0..4.0),
        spell_lambda: 0.5,
    };
    RandomFixture {
        store,
        instance,
        candidates,
        config,
    }
}
