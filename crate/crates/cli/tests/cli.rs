use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let w = |name: &str, text: &str| std::fs::write(dir.path().join(name), text).unwrap();
        w("lexicon.txt", "# toy word list\ngoing\npoint\njoint\nhome\nanemia\npatient\nthe\nto\nis\n");
        w(
            "words.vec",
            "6 3\nhome 1 0 0.1\ngoing 1 0.1 0\npoint 0 1 0\nanemia 0 0 1\npatient 0.5 0.5 0\nthe 0.3 0.3 0.3\n",
        );
        w("ngrams.vec", "2 3 3 3\n<jo 0 0.5 0.5\nint 0 0.1 0.1\n");
        w("freqs.tsv", "going\t10\npoint\t1000\njoint\t5\nhome\t50\nthe\t5000\n");
        w("dev.tsv", "\tgoint\tgoing\thome\nanemia\tpoinnt\tpoint\t\n");
        Self { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn stores(&self) -> Vec<String> {
        [
            ("--lexicon", "lexicon.txt"),
            ("--vectors", "words.vec"),
            ("--ngrams", "ngrams.vec"),
            ("--freqs", "freqs.tsv"),
        ]
        .iter()
        .flat_map(|(flag, f)| [flag.to_string(), self.path(f).display().to_string()])
        .collect()
    }

    fn run(&self, args: &[&str], with_stores: bool) -> Output {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_ctxspell"));
        cmd.args(args);
        if with_stores {
            cmd.args(self.stores());
        }
        cmd.output().unwrap()
    }
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn correct_tsv_ranks_by_context() {
    let f = Fixture::new();
    let input = f.write("in.tsv", "\tgoint\t\thome\n");
    let o = f.run(&["correct", p(&input)], true);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let first = out.lines().next().unwrap();
    assert!(first.starts_with("goint\tgoing:"), "{first}");
    // going, joint, point: fewer than the default top 5
    assert_eq!(first.split('\t').count(), 4);
}

#[test]
fn correct_noisy_prefers_frequent() {
    let f = Fixture::new();
    let input = f.write("in.tsv", "\tgoint\t\thome\n");
    let o = f.run(&["correct", p(&input), "--ranker", "noisy", "--top-k", "1"], true);
    assert!(o.status.success(), "{}", stderr(&o));
    let line = stdout(&o);
    assert!(line.starts_with("goint\tpoint:"), "{line}");
    assert_eq!(line.trim_end().split('\t').count(), 2);
}

#[test]
fn correct_raw_text_detects_nonwords() {
    let f = Fixture::new();
    let input = f.write("in.txt", "The patient is goint home.\n\nAnemia 12mg\n");
    let o = f.run(&["correct", p(&input)], true);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1, "{out}");
    assert!(out.starts_with("goint\tgoing:"));
}

#[test]
fn correct_empty_input() {
    let f = Fixture::new();
    let input = f.write("empty.tsv", "");
    let o = f.run(&["correct", p(&input)], true);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn usage_and_startup_errors() {
    let f = Fixture::new();
    let input = f.write("in.tsv", "\tgoint\t\t\n");
    let o = f.run(&["correct", p(&input), "--ranker", "oracle"], true);
    assert_eq!(o.status.code(), Some(2));
    let o = f.run(&["correct", p(&input), "--lexicon", p(&f.path("lexicon.txt")), "--vectors", "/nonexistent.vec"], false);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("/nonexistent.vec"));
}

#[test]
fn config_file_with_flag_override() {
    let f = Fixture::new();
    let cfg = f.write(
        "run.conf",
        &format!(
            "# experiment\nlexicon = {}\nvectors = {}\nfreqs = {}\nwindow = 3\nedit_penalty = dm\nseed = 4\n",
            p(&f.path("lexicon.txt")),
            p(&f.path("words.vec")),
            p(&f.path("freqs.tsv"))
        ),
    );
    let o = f.run(&["evaluate", p(&f.path("dev.tsv")), "--config", p(&cfg), "--window", "5"], false);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["ranking"]["window"], 5);
    assert_eq!(v["config"]["ranking"]["edit_penalty"], "dm");
    assert_eq!(v["seed"], 4);

    let bad = f.write("bad.conf", "windw = 3\n");
    let o = f.run(&["evaluate", p(&f.path("dev.tsv")), "--config", p(&bad)], true);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("windw"));
}

#[test]
fn evaluate_reports_accuracy_and_mode() {
    let f = Fixture::new();
    let dev = f.path("dev.tsv");
    let o = f.run(&["evaluate", p(&dev)], true);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["accuracy"], 50.0);
    assert_eq!(v["result"]["mode"], "true");
    assert_eq!(v["result"]["total"], 2);
    assert!(v["tool_version"].is_string());
    assert_eq!(v["corpus_paths"][0], p(&dev));

    let out = f.path("report.json");
    let o = f.run(&["evaluate", p(&dev), "--mode", "upper_bound", "--out", p(&out)], true);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["result"]["mode"], "upper_bound");
}

#[test]
fn evaluate_rejects_missing_gold() {
    let f = Fixture::new();
    let corpus = f.write("nogold.tsv", "\tgoint\t\thome\n");
    let o = f.run(&["evaluate", p(&corpus)], true);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("contract violation"), "{}", stderr(&o));
}

#[test]
fn generate_is_seeded_and_filters() {
    let f = Fixture::new();
    let text = "the patient is going home\nanemia point to the home\n".repeat(20);
    let corpus = f.write("corpus.txt", &text);
    let run = |seed: &str, setup: &str, target: &str| {
        f.run(&["generate", p(&corpus), "--setup", setup, "--target", target, "--seed", seed], true)
    };
    let a = run("9", "1", "10");
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&run("9", "1", "10")));
    assert_eq!(stdout(&a).lines().count(), 10);

    // "is" and "to" are the only lexicon forms in the corpus without a vector
    let oov = run("9", "3", "5");
    assert!(oov.status.success(), "{}", stderr(&oov));
    for line in stdout(&oov).lines() {
        assert!(matches!(line.split('\t').nth(2), Some("is" | "to")), "{line}");
    }

    let short = run("9", "1", "1000");
    assert!(!short.status.success());
    assert!(stderr(&short).contains("40 of 1000"), "{}", stderr(&short));
}

#[test]
fn grid_rows_match_axes() {
    let f = Fixture::new();
    let dev = p(&f.path("dev.tsv")).to_string();
    let o = f.run(
        &[
            "grid",
            "--setup1",
            &dev,
            "--setup2",
            &dev,
            "--windows",
            "1,2,3",
            "--compositions",
            "addition",
            "--edit-penalties",
            "dl",
            "--reciprocal-values",
            "on",
            "--stopword-values",
            "off",
            "--misspelling-vector-values",
            "off",
        ],
        true,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 3);

    let o = f.run(&["grid", "--setup1", &dev, "--setup2", &dev], true);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 960);
}

#[test]
fn tune_oov_normalizes_weights() {
    let f = Fixture::new();
    let dev = p(&f.path("dev.tsv")).to_string();
    let o = f.run(
        &["tune-oov", "--setup1", &dev, "--setup2", &dev, "--setup3", &dev, "--weights", "1,1,2", "--penalties", "1,2,4"],
        true,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["weights"], serde_json::json!([0.25, 0.25, 0.5]));
    assert_eq!(v["config"]["weights"], serde_json::json!([0.25, 0.25, 0.5]));
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 3);

    let o = f.run(&["tune-oov", "--setup1", &dev, "--setup2", &dev, "--setup3", &dev, "--weights", "1,1"], true);
    assert!(!o.status.success());
}

#[test]
fn detect_frequency_boundary() {
    let f = Fixture::new();
    let mut text = String::new();
    for _ in 0..5 {
        text.push_str("the pateint is home\n");
    }
    for _ in 0..6 {
        text.push_str("chornic\n");
    }
    text.push_str("home goint anemia\n");
    let corpus = f.write("notes.txt", &text);
    let o = f.run(&["detect", p(&corpus), "--lexicon", p(&f.path("lexicon.txt"))], false);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let forms: Vec<&str> = out.lines().map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert_eq!(forms, ["pateint", "pateint", "pateint", "pateint", "pateint", "goint"]);
    assert!(out.lines().all(|l| l.split('\t').nth(2) == Some("")));
    assert_eq!(out.lines().last().unwrap(), "home\tgoint\t\tanemia");
}
