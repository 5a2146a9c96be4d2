mod common;

use ctxspell::text_norm::{is_normalized, normalize_form};
use ctxspell::{
    dl_distance, dl_within, evaluate_prepared, induce_error, rank_context, rank_noisy_channel, tokenize_line,
    CandidateGenerator, CandidatePolicy, ContextRanker, EditPenalty, EmbeddingStore, ErrorSpec, EvalMode,
    FrequencyTable, Lexicon, MisspellingInstance, Stopwords,
};
use proptest::prelude::*;
use rand::SeedableRng;

use common::{osa_oracle, random_fixture};

fn word() -> impl Strategy<Value = String> {
    "[a-f]{2,7}"
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn tokens_are_normalized_and_stable(line in "[A-Za-z0-9 ,.!'-]{0,40}") {
        for tok in tokenize_line(&line) {
            prop_assert!(is_normalized(tok.as_str()));
            let n = normalize_form(tok.as_str());
            prop_assert_eq!(n.as_deref(), Some(tok.as_str()));
            let again = tokenize_line(tok.as_str());
            prop_assert_eq!(again.len(), 1);
            prop_assert_eq!(&again[0], &tok);
        }
    }

    #[test]
    fn distance_matches_oracle(a in "[abc]{0,8}", b in "[abc]{0,8}", cap in 0usize..4) {
        let d = osa_oracle(&a, &b);
        prop_assert_eq!(dl_distance(&a, &b), d);
        prop_assert_eq!(dl_distance(&b, &a), d);
        prop_assert_eq!(dl_within(&a, &b, cap), (d <= cap).then_some(d));
    }

    #[test]
    fn lexicon_union_ignores_order(mut a in prop::collection::vec(word(), 0..12), b in prop::collection::vec(word(), 0..12)) {
        let ab = Lexicon::from_forms(a.iter().chain(&b));
        let ba = Lexicon::from_forms(b.iter().chain(&a));
        prop_assert_eq!(&ab, &ba);
        a.reverse();
        prop_assert_eq!(Lexicon::from_forms(&a).augment(&b), ab.clone());
        // shortest first, sorted within a length
        let forms: Vec<(usize, &str)> = ab.iter().map(|f| (f.chars().count(), &**f)).collect();
        prop_assert!(forms.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn induced_errors_are_nonwords_at_stated_distance(
        words in prop::collection::btree_set(word(), 1..8),
        seed in any::<u64>(),
    ) {
        let lexicon = Lexicon::from_forms(&words);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for w in &words {
            match induce_error(w, &ErrorSpec::default(), &lexicon, &mut rng) {
                Ok(e) => {
                    prop_assert!(!lexicon.contains(&e.misspelling));
                    prop_assert!(is_normalized(&e.misspelling));
                    prop_assert_eq!(dl_distance(w, &e.misspelling), e.n_ops);
                    prop_assert_eq!(e.ops.len(), e.n_ops);
                }
                Err(ctxspell::Error::InductionExhausted { .. }) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }

    #[test]
    fn ranked_lists_are_permutations_sorted_by_score(seed in any::<u64>()) {
        let fx = random_fixture(seed);
        let ranked = rank_context(&fx.instance, &fx.candidates, &fx.config, &fx.store, &Stopwords::new()).unwrap();
        prop_assert_eq!(ranked.len(), fx.candidates.len());
        prop_assert_eq!(ranked.tie_break_trace.len(), ranked.len() - 1);
        prop_assert!(ranked.entries.windows(2).all(|w| w[0].score >= w[1].score));
        prop_assert!(ranked.entries.iter().all(|e| e.score >= 0.0 && e.score.is_finite()));
        let mut got: Vec<&str> = ranked.forms().collect();
        let mut want: Vec<&str> = fx.candidates.iter().map(|c| c.form.as_str()).collect();
        got.sort_unstable();
        want.sort_unstable();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn input_order_does_not_change_ranking(seed in any::<u64>()) {
        let fx = random_fixture(seed);
        let mut rev = fx.candidates.clone();
        rev.reverse();
        let stop = Stopwords::new();
        let a = rank_context(&fx.instance, &fx.candidates, &fx.config, &fx.store, &stop).unwrap();
        let b = rank_context(&fx.instance, &rev, &fx.config, &fx.store, &stop).unwrap();
        prop_assert_eq!(a.forms().collect::<Vec<_>>(), b.forms().collect::<Vec<_>>());
    }

    #[test]
    fn oov_scores_drop_with_penalty(seed in any::<u64>(), extra in 1.0f64..3.0) {
        let fx = random_fixture(seed);
        let stop = Stopwords::new();
        let mut harsher = fx.config.clone();
        harsher.oov_penalty *= extra;
        let a = rank_context(&fx.instance, &fx.candidates, &fx.config, &fx.store, &stop).unwrap();
        let b = rank_context(&fx.instance, &fx.candidates, &harsher, &fx.store, &stop).unwrap();
        let score = |l: &ctxspell::RankedList, f: &str| l.entries.iter().find(|e| e.candidate.form == f).unwrap().score;
        for c in &fx.candidates {
            let (sa, sb) = (score(&a, &c.form), score(&b, &c.form));
            if c.in_embedding_vocab {
                prop_assert_eq!(sa, sb);
            } else {
                prop_assert!(sb <= sa);
            }
        }
    }

    #[test]
    fn noisy_channel_ignores_context(seed in any::<u64>()) {
        let fx = random_fixture(seed);
        let freqs = FrequencyTable::from_counts(fx.candidates.iter().map(|c| (c.form.clone(), c.frequency)));
        let bare = MisspellingInstance::new(vec![], fx.instance.misspelling.clone(), vec![], None).unwrap();
        let a = rank_noisy_channel(&fx.instance, &fx.candidates, &freqs, 0.5).unwrap();
        let b = rank_noisy_channel(&bare, &fx.candidates, &freqs, 0.5).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn report_counts_reconcile() {
    let r = common::rehearsal();
    let lines: Vec<String> = r.lines.iter().take(400).cloned().collect();
    let instances = ctxspell::corpus::generate_from_lines(
        &lines,
        &r.lexicon,
        &r.store,
        ctxspell::SetupFilter::InVectorVocab,
        60,
        &ErrorSpec::default(),
        5,
    )
    .unwrap();
    let generator = CandidateGenerator::new(r.lexicon.clone());
    let stop = Stopwords::builtin(ctxspell::Lang::En);
    let ranker = ContextRanker::new(&r.store, &stop, Default::default()).unwrap();
    for mode in [EvalMode::True, EvalMode::UpperBound] {
        let prepared = ctxspell::PreparedCorpus::new(
            &instances,
            &generator,
            mode,
            CandidatePolicy::All,
            &r.freqs,
            &r.store,
        )
        .unwrap();
        let rep = evaluate_prepared(&prepared, &ranker).unwrap();
        let binned: usize = [rep.per_bin.relfreq_1.count, rep.per_bin.relfreq_2.count, rep.per_bin.relfreq_gt2.count]
            .iter()
            .sum();
        assert_eq!(rep.total, instances.len());
        assert_eq!(binned + rep.excluded_from_bins + rep.no_candidate_count, rep.total);
        assert!(rep.correct_first <= rep.total - rep.no_candidate_count);
        assert!((0.0..=100.0).contains(&rep.accuracy));
        if mode == EvalMode::UpperBound {
            assert_eq!(rep.excluded_from_bins, 0);
        }
    }
}

#[test]
fn generic_store_agrees_across_scalars() {
    let mut s32 = EmbeddingStore::<f32>::new(2, 3, 3).unwrap();
    let mut s64 = EmbeddingStore::<f64>::new(2, 3, 3).unwrap();
    for (w, v) in [("ward", [1.0, 0.25]), ("word", [0.5, -1.0]), ("nurse", [1.0, 0.5])] {
        s32.add_word(w, &[v[0] as f32, v[1] as f32]).unwrap();
        s64.add_word(w, &v).unwrap();
    }
    let inst = MisspellingInstance::new(vec!["nurse".into()], "wrd", vec![], None).unwrap();
    let lex = Lexicon::from_forms(["ward", "word"]);
    let generator = CandidateGenerator::new(lex);
    let freqs = FrequencyTable::new();
    let cands = generator.generate("wrd", &freqs, &s64).unwrap();
    let stop = Stopwords::new();
    let mut cfg = ctxspell::RankingConfig::default();
    cfg.edit_penalty = EditPenalty::Dl;
    let a = rank_context(&inst, &cands, &cfg, &s32, &stop).unwrap();
    let b = rank_context(&inst, &cands, &cfg, &s64, &stop).unwrap();
    assert_eq!(a.forms().collect::<Vec<_>>(), b.forms().collect::<Vec<_>>());
    assert_eq!(a.best().form, "ward");
}
