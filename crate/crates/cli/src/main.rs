use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ctxspell::corpus::{format_instances, DEFAULT_FREQ_CAP};
use ctxspell::eval::{normalize_weights, DEFAULT_OOV_WEIGHTS};
use ctxspell::{
    detect_misspellings, generate_corpus, grid_search, read_instances, tokenize_line, tune_oov_penalty,
    CandidateGenerator, CandidatePolicy, Composition, ContextRanker, EditPenalty, EmbeddingStore, ErrorSpec, EvalMode,
    FrequencyTable, GridSpace, Lang, Lexicon, MisspellingInstance, NoisyChannelRanker, PreparedCorpus, Ranker,
    RankingConfig, ReportEnvelope, SetupFilter, Stopwords,
};

/// Context-sensitive spelling correction and its evaluation harness.
#[derive(Debug, Parser)]
#[command(name = "ctxspell", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rank corrections for an instance TSV or for non-words in raw text.
    Correct(CorrectArgs),
    /// Build a self-induced error corpus from raw text.
    Generate(GenerateArgs),
    /// First-best accuracy of a ranker on an instance TSV.
    Evaluate(EvaluateArgs),
    /// Sweep the ranking parameter grid on two development corpora.
    Grid(GridArgs),
    /// Choose the OOV penalty on three development corpora.
    TuneOov(TuneOovArgs),
    /// List rare non-lexicon tokens of a corpus as instances without gold.
    Detect(DetectArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RankerKind {
    Context,
    Noisy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    /// TSV if the first non-empty line has a tab, raw text otherwise.
    Auto,
    Tsv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    All,
    InVocabOnly,
}

impl From<PolicyArg> for CandidatePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::All => CandidatePolicy::All,
            PolicyArg::InVocabOnly => CandidatePolicy::InVocabOnly,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct Shared {
    /// Key-value config file (`key = value`); flags win over it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Word-list file; repeat to fuse several.
    #[arg(long)]
    lexicon: Vec<PathBuf>,
    /// Word vectors (text format, header `<count> <dim>`).
    #[arg(long)]
    vectors: Option<PathBuf>,
    /// Character n-gram vectors (header `<count> <dim> <minn> <maxn>`).
    #[arg(long)]
    ngrams: Option<PathBuf>,
    /// Corpus frequencies, `word<TAB>count` per line.
    #[arg(long)]
    freqs: Option<PathBuf>,
    /// Stopword list; defaults to the built-in list for --lang.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_lang)]
    lang: Option<Lang>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long)]
    window: Option<usize>,
    #[arg(long, value_parser = parse_keyword::<Composition>)]
    composition: Option<Composition>,
    #[arg(long, value_parser = parse_keyword::<EditPenalty>)]
    edit_penalty: Option<EditPenalty>,
    #[arg(long, value_parser = parse_bool)]
    reciprocal: Option<bool>,
    #[arg(long, value_parser = parse_bool)]
    remove_stopwords: Option<bool>,
    #[arg(long, value_parser = parse_bool)]
    misspelling_vector: Option<bool>,
    #[arg(long)]
    oov_penalty: Option<f64>,
    #[arg(long)]
    spell_lambda: Option<f64>,
}

#[derive(Debug, Args)]
struct CorrectArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = RankerKind::Context)]
    ranker: RankerKind,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    format: InputFormat,
    #[arg(long)]
    top_k: Option<usize>,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    corpus: PathBuf,
    /// 1 and 2 keep in-vocabulary golds, 3 keeps OOV golds.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    setup: u8,
    #[arg(long)]
    target: usize,
    #[arg(long, default_value_t = ctxspell::corpus::DEFAULT_ONE_OP_SHARE)]
    one_op_share: f64,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    corpus: PathBuf,
    #[arg(long, value_enum, default_value_t = RankerKind::Context)]
    ranker: RankerKind,
    #[arg(long, default_value = "true", value_parser = parse_keyword::<EvalMode>)]
    mode: EvalMode,
    #[arg(long, value_enum, default_value_t = PolicyArg::All)]
    policy: PolicyArg,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long)]
    setup1: PathBuf,
    #[arg(long)]
    setup2: PathBuf,
    /// Restrict the window axis, e.g. `1,5,9`.
    #[arg(long, value_delimiter = ',')]
    windows: Vec<usize>,
    #[arg(long, value_delimiter = ',', value_parser = parse_keyword::<Composition>)]
    compositions: Vec<Composition>,
    #[arg(long, value_delimiter = ',', value_parser = parse_keyword::<EditPenalty>)]
    edit_penalties: Vec<EditPenalty>,
    #[arg(long, value_delimiter = ',', value_parser = parse_bool)]
    reciprocal_values: Vec<bool>,
    #[arg(long, value_delimiter = ',', value_parser = parse_bool)]
    stopword_values: Vec<bool>,
    #[arg(long, value_delimiter = ',', value_parser = parse_bool)]
    misspelling_vector_values: Vec<bool>,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Debug, Args)]
struct TuneOovArgs {
    #[arg(long)]
    setup1: PathBuf,
    #[arg(long)]
    setup2: PathBuf,
    #[arg(long)]
    setup3: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0, 5.0])]
    penalties: Vec<f64>,
    /// Three weights over the setups; scaled to sum to one.
    #[arg(long, value_delimiter = ',', num_args = 1, default_values_t = DEFAULT_OOV_WEIGHTS)]
    weights: Vec<f64>,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Debug, Args)]
struct DetectArgs {
    corpus: PathBuf,
    #[arg(long, default_value_t = DEFAULT_FREQ_CAP)]
    freq_cap: u64,
    #[command(flatten)]
    shared: Shared,
}

fn parse_keyword<T: std::str::FromStr<Err = ctxspell::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: ctxspell::Error| e.to_string())
}

fn parse_lang(s: &str) -> Result<Lang, String> {
    parse_keyword(s)
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(format!("expected a boolean, got {s:?}")),
    }
}

/// `key = value` lines; `#` starts a comment line. Repeated keys
/// accumulate (only `lexicon` uses more than the last value).
fn read_config_file(path: &Path) -> Result<BTreeMap<String, Vec<String>>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected key = value", path.display(), n + 1))?;
        map.entry(k.trim().replace('-', "_")).or_default().push(v.trim().to_string());
    }
    Ok(map)
}

/// Everything a command needs, after merging defaults, the config file
/// and flags.
#[derive(Debug, Clone, Serialize)]
struct ToolConfig {
    lexicons: Vec<PathBuf>,
    vectors: Option<PathBuf>,
    ngrams: Option<PathBuf>,
    freqs: Option<PathBuf>,
    stopwords: Option<PathBuf>,
    seed: u64,
    lang: Lang,
    ranking: RankingConfig,
    top_k: usize,
}

const DEFAULT_TOP_K: usize = 5;

impl ToolConfig {
    fn resolve(shared: &Shared, top_k: Option<usize>) -> Result<Self> {
        let file = match &shared.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        const KNOWN: &[&str] = &[
            "lexicon",
            "vectors",
            "ngrams",
            "freqs",
            "stopwords",
            "seed",
            "lang",
            "window",
            "composition",
            "edit_penalty",
            "reciprocal_weighting",
            "remove_stopwords",
            "include_misspelling_vector",
            "oov_penalty",
            "spell_lambda",
            "top_k",
        ];
        if let Some(k) = file.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            bail!("unknown config key {k:?}");
        }
        let last = |k: &str| file.get(k).and_then(|v| v.last()).map(String::as_str);
        fn parsed<T>(key: &str, v: Option<&str>, f: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>> {
            v.map(|s| f(s).map_err(|e| anyhow!("config {key}: {e}"))).transpose()
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| e.to_string());
        let int = |s: &str| s.parse::<usize>().map_err(|e| e.to_string());

        let lang = shared.lang.or(parsed("lang", last("lang"), parse_lang)?).unwrap_or_default();
        let mut ranking = RankingConfig::for_lang(lang);
        if let Some(v) = shared.window.or(parsed("window", last("window"), int)?) {
            ranking.window = v;
        }
        if let Some(v) = shared.composition.or(parsed("composition", last("composition"), parse_keyword)?) {
            ranking.composition = v;
        }
        if let Some(v) = shared.edit_penalty.or(parsed("edit_penalty", last("edit_penalty"), parse_keyword)?) {
            ranking.edit_penalty = v;
        }
        if let Some(v) = shared
            .reciprocal
            .or(parsed("reciprocal_weighting", last("reciprocal_weighting"), parse_bool)?)
        {
            ranking.reciprocal_weighting = v;
        }
        if let Some(v) = shared
            .remove_stopwords
            .or(parsed("remove_stopwords", last("remove_stopwords"), parse_bool)?)
        {
            ranking.remove_stopwords = v;
        }
        if let Some(v) = shared.misspelling_vector.or(parsed(
            "include_misspelling_vector",
            last("include_misspelling_vector"),
            parse_bool,
        )?) {
            ranking.include_misspelling_vector = v;
        }
        if let Some(v) = shared.oov_penalty.or(parsed("oov_penalty", last("oov_penalty"), num)?) {
            ranking.oov_penalty = v;
        }
        if let Some(v) = shared.spell_lambda.or(parsed("spell_lambda", last("spell_lambda"), num)?) {
            ranking.spell_lambda = v;
        }
        ranking.validate()?;

        let path = |flag: &Option<PathBuf>, key: &str| flag.clone().or_else(|| last(key).map(PathBuf::from));
        let lexicons = if shared.lexicon.is_empty() {
            file.get("lexicon").into_iter().flatten().map(PathBuf::from).collect()
        } else {
            shared.lexicon.clone()
        };
        let cfg = Self {
            lexicons,
            vectors: path(&shared.vectors, "vectors"),
            ngrams: path(&shared.ngrams, "ngrams"),
            freqs: path(&shared.freqs, "freqs"),
            stopwords: path(&shared.stopwords, "stopwords"),
            seed: match shared.seed {
                Some(s) => s,
                None => parsed("seed", last("seed"), |s| s.parse::<u64>().map_err(|e| e.to_string()))?.unwrap_or(0),
            },
            lang,
            ranking,
            top_k: match top_k {
                Some(k) => k,
                None => parsed("top_k", last("top_k"), int)?.unwrap_or(DEFAULT_TOP_K),
            },
        };
        for p in cfg
            .lexicons
            .iter()
            .chain(&cfg.vectors)
            .chain(&cfg.ngrams)
            .chain(&cfg.freqs)
            .chain(&cfg.stopwords)
        {
            if !p.is_file() {
                bail!("missing file {}", p.display());
            }
        }
        Ok(cfg)
    }

    fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    fn lexicon(&self) -> Result<Lexicon> {
        if self.lexicons.is_empty() {
            bail!("no lexicon given (--lexicon)");
        }
        Ok(Lexicon::load(&self.lexicons)?)
    }

    fn store(&self, required: bool) -> Result<EmbeddingStore<f32>> {
        match &self.vectors {
            Some(v) => Ok(EmbeddingStore::load(v, self.ngrams.as_deref())?),
            None if required => bail!("no word vectors given (--vectors)"),
            None => Ok(EmbeddingStore::new(1, 3, 6)?),
        }
    }

    fn freqs(&self) -> Result<FrequencyTable> {
        Ok(match &self.freqs {
            Some(p) => FrequencyTable::load(p)?,
            None => FrequencyTable::new(),
        })
    }

    fn stopword_list(&self) -> Result<Stopwords> {
        Ok(match &self.stopwords {
            Some(p) => Stopwords::load(p)?,
            None => Stopwords::builtin(self.lang),
        })
    }
}

struct Output(Box<dyn Write>);

impl Output {
    fn open(path: &Option<PathBuf>) -> Result<Self> {
        Ok(Output(match path {
            Some(p) => Box::new(std::io::BufWriter::new(
                std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
            )),
            None => Box::new(std::io::BufWriter::new(std::io::stdout().lock())),
        }))
    }

    fn write(mut self, text: &str) -> Result<()> {
        self.0.write_all(text.as_bytes())?;
        self.0.flush()?;
        Ok(())
    }
}

fn json_report<R: Serialize>(cfg: &ToolConfig, corpora: Vec<PathBuf>, result: R, extra: serde_json::Value) -> String {
    let mut echo = cfg.echo();
    if let (Some(obj), serde_json::Value::Object(more)) = (echo.as_object_mut(), extra) {
        obj.extend(more);
    }
    let mut s = ReportEnvelope::new(corpora, Some(cfg.seed), echo, result).to_json();
    s.push('\n');
    s
}

fn text_instances(path: &Path, lexicon: &Lexicon) -> Result<Vec<MisspellingInstance>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for line in text.lines() {
        let tokens: Vec<String> = tokenize_line(line).into_iter().map(|t| t.into_string()).collect();
        for (i, t) in tokens.iter().enumerate() {
            if !lexicon.contains(t) {
                let left = tokens[i.saturating_sub(ctxspell::rankers::MAX_CONTEXT)..i].to_vec();
                let right = tokens[i + 1..tokens.len().min(i + 1 + ctxspell::rankers::MAX_CONTEXT)].to_vec();
                out.push(MisspellingInstance::new(left, t.clone(), right, None)?);
            }
        }
    }
    Ok(out)
}

fn is_tsv(path: &Path) -> Result<bool> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.lines().find(|l| !l.trim().is_empty()).is_some_and(|l| l.contains('\t')))
}

fn cmd_correct(a: CorrectArgs) -> Result<()> {
    let cfg = ToolConfig::resolve(&a.shared, a.top_k)?;
    let lexicon = cfg.lexicon()?;
    let store = cfg.store(a.ranker == RankerKind::Context)?;
    let freqs = cfg.freqs()?;
    let stop = cfg.stopword_list()?;
    let tsv = match a.format {
        InputFormat::Tsv => true,
        InputFormat::Text => false,
        InputFormat::Auto => is_tsv(&a.input)?,
    };
    let instances = if tsv { read_instances(&a.input)? } else { text_instances(&a.input, &lexicon)? };
    let gen = CandidateGenerator::new(lexicon);
    let ranker: Box<dyn Ranker> = match a.ranker {
        RankerKind::Context => Box::new(ContextRanker::new(&store, &stop, cfg.ranking.clone())?),
        RankerKind::Noisy => Box::new(NoisyChannelRanker {
            freqs: &freqs,
            spell_lambda: cfg.ranking.spell_lambda,
        }),
    };
    let mut out = String::new();
    for inst in &instances {
        out.push_str(&inst.misspelling);
        let candidates = if gen.lexicon().contains(&inst.misspelling) {
            Vec::new()
        } else {
            gen.generate(&inst.misspelling, &freqs, &store)?
        };
        if !candidates.is_empty() {
            let ranked = ranker.rank(inst, &candidates)?;
            for e in ranked.entries.iter().take(cfg.top_k) {
                out.push_str(&format!("\t{}:{:.6}", e.candidate.form, e.score));
            }
        }
        out.push('\n');
    }
    Output::open(&a.shared.out)?.write(&out)
}

fn cmd_generate(a: GenerateArgs) -> Result<()> {
    let cfg = ToolConfig::resolve(&a.shared, None)?;
    let lexicon = cfg.lexicon()?;
    let store = cfg.store(true)?;
    let spec = ErrorSpec {
        one_op_share: a.one_op_share,
        ..ErrorSpec::default()
    };
    let filter = SetupFilter::for_setup(a.setup)?;
    let instances = generate_corpus(&a.corpus, &lexicon, &store, filter, a.target, &spec, cfg.seed)?;
    Output::open(&a.shared.out)?.write(&format_instances(&instances))
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<()> {
    let cfg = ToolConfig::resolve(&a.shared, None)?;
    let instances = read_instances(&a.corpus)?;
    let lexicon = cfg.lexicon()?;
    let store = cfg.store(a.ranker == RankerKind::Context)?;
    let freqs = cfg.freqs()?;
    let stop = cfg.stopword_list()?;
    let gen = CandidateGenerator::new(lexicon);
    let prepared = PreparedCorpus::new(&instances, &gen, a.mode, a.policy.into(), &freqs, &store)?;
    let report = match a.ranker {
        RankerKind::Context => {
            ctxspell::evaluate_prepared(&prepared, &ContextRanker::new(&store, &stop, cfg.ranking.clone())?)?
        }
        RankerKind::Noisy => ctxspell::evaluate_prepared(
            &prepared,
            &NoisyChannelRanker {
                freqs: &freqs,
                spell_lambda: cfg.ranking.spell_lambda,
            },
        )?,
    };
    let extra = serde_json::json!({ "policy": format!("{:?}", a.policy).to_lowercase() });
    Output::open(&a.shared.out)?.write(&json_report(&cfg, vec![a.corpus], report, extra))
}

fn cmd_grid(a: GridArgs) -> Result<()> {
    let cfg = ToolConfig::resolve(&a.shared, None)?;
    let lexicon = cfg.lexicon()?;
    let store = cfg.store(true)?;
    let freqs = cfg.freqs()?;
    let stop = cfg.stopword_list()?;
    let gen = CandidateGenerator::new(lexicon);
    let prep = |p: &Path| -> Result<PreparedCorpus> {
        let insts = read_instances(p)?;
        if insts.is_empty() {
            bail!("{} holds no instances", p.display());
        }
        Ok(PreparedCorpus::new(&insts, &gen, EvalMode::True, CandidatePolicy::InVocabOnly, &freqs, &store)?)
    };
    let (s1, s2) = (prep(&a.setup1)?, prep(&a.setup2)?);
    let mut space = GridSpace::full();
    macro_rules! restrict {
        ($($field:ident <- $arg:ident),*) => {$(
            if !a.$arg.is_empty() {
                space.$field = a.$arg.clone();
            }
        )*};
    }
    restrict!(
        windows <- windows,
        compositions <- compositions,
        edit_penalties <- edit_penalties,
        reciprocal_weighting <- reciprocal_values,
        remove_stopwords <- stopword_values,
        include_misspelling_vector <- misspelling_vector_values
    );
    let result = grid_search(&s1, &s2, &space, &cfg.ranking, &store, &stop)?;
    let extra = serde_json::json!({ "space": space });
    Output::open(&a.shared.out)?.write(&json_report(&cfg, vec![a.setup1, a.setup2], result, extra))
}

fn cmd_tune_oov(a: TuneOovArgs) -> Result<()> {
    let cfg = ToolConfig::resolve(&a.shared, None)?;
    let weights: [f64; 3] = a
        .weights
        .as_slice()
        .try_into()
        .map_err(|_| anyhow!("--weights takes exactly three values, got {}", a.weights.len()))?;
    let weights = normalize_weights(weights)?;
    let lexicon = cfg.lexicon()?;
    let store = cfg.store(true)?;
    let freqs = cfg.freqs()?;
    let stop = cfg.stopword_list()?;
    let gen = CandidateGenerator::new(lexicon);
    let prep = |p: &Path| -> Result<PreparedCorpus> {
        let insts = read_instances(p)?;
        Ok(PreparedCorpus::new(&insts, &gen, EvalMode::True, CandidatePolicy::All, &freqs, &store)?)
    };
    let corpora = [prep(&a.setup1)?, prep(&a.setup2)?, prep(&a.setup3)?];
    let result = tune_oov_penalty(
        [&corpora[0], &corpora[1], &corpora[2]],
        &cfg.ranking,
        &a.penalties,
        weights,
        &store,
        &stop,
    )?;
    let extra = serde_json::json!({ "penalties": a.penalties, "weights": weights });
    Output::open(&a.shared.out)?.write(&json_report(&cfg, vec![a.setup1, a.setup2, a.setup3], result, extra))
}

fn cmd_detect(a: DetectArgs) -> Result<()> {
    let cfg = ToolConfig::resolve(&a.shared, None)?;
    let lexicon = cfg.lexicon()?;
    let found = detect_misspellings(&a.corpus, &lexicon, a.freq_cap)?;
    Output::open(&a.shared.out)?.write(&format_instances(&found))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Correct(a) => cmd_correct(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Grid(a) => cmd_grid(a),
        Command::TuneOov(a) => cmd_tune_oov(a),
        Command::Detect(a) => cmd_detect(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ctxspell: {e:#}");
            ExitCode::FAILURE
        }
    }
}
