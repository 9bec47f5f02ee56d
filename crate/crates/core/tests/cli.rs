mod common;

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use common::{copy_dir, fixture_corpus, tree};

const FAST: [&str; 4] = ["--dim", "16", "--epochs", "5"];

fn patchsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_patchsim"))
        .args(args)
        .output()
        .expect("run patchsim")
}

fn run_args<'a>(sub: &'a str, corpus: &'a Path, out: &'a Path) -> Vec<&'a str> {
    let mut v = vec![
        sub,
        "--corpus",
        corpus.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    v.extend(FAST);
    v
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn names(root: &Path) -> Vec<String> {
    tree(root).into_iter().map(|(p, _)| p).collect()
}

#[test]
fn pipeline_writes_the_full_tree() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = patchsim(&run_args("pipeline", &fixture_corpus(), &out));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let got = names(&out);
    for want in [
        "charts/eslint-1.svg",
        "charts/eslint-217.svg",
        "charts/eslint-47.svg",
        "charts/ndcg.svg",
        "corpus.json",
        "evals.json",
        "models/eslint-1.pvdm",
        "models/eslint-217.pvdm",
        "models/eslint-47.pvdm",
        "ndcg.csv",
        "rankings/eslint-1.json",
        "rankings/eslint-217.json",
        "rankings/eslint-47.json",
        "run-config.json",
    ] {
        assert!(got.iter().any(|g| g == want), "missing {want} in {got:?}");
    }
    let csv = std::fs::read_to_string(out.join("ndcg.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.contains("eslint-1,6,"));
}

#[test]
fn missing_annotations_are_a_notice_not_a_failure() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    copy_dir(&fixture_corpus(), &corpus);
    std::fs::remove_file(corpus.join("eslint-47/annotations.json")).unwrap();
    let out = dir.path().join("out");
    let o = patchsim(&run_args("pipeline", &corpus, &out));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("eslint-47"));
    let csv = std::fs::read_to_string(out.join("ndcg.csv")).unwrap();
    let row = csv.lines().find(|l| l.starts_with("eslint-47,")).unwrap();
    assert!(row.contains(",,"), "{row}");
}

#[test]
fn malformed_bug_gives_partial_failure() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    copy_dir(&fixture_corpus(), &corpus);
    std::fs::write(
        corpus.join("eslint-217/meta.json"),
        "{\"faulty_line\": \"x\"}",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = patchsim(&run_args("pipeline", &corpus, &out));
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("eslint-217"));
    assert!(out.join("rankings/eslint-1.json").is_file());
    assert!(!out.join("rankings/eslint-217.json").exists());
}

#[test]
fn missing_corpus_is_a_hard_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = patchsim(&run_args(
        "pipeline",
        &dir.path().join("nope"),
        &dir.path().join("out"),
    ));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn stages_in_separate_processes_match_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture_corpus();
    let whole = dir.path().join("whole");
    let staged = dir.path().join("staged");
    assert_eq!(
        patchsim(&run_args("pipeline", &corpus, &whole))
            .status
            .code(),
        Some(0)
    );
    for sub in ["ingest", "train", "rank", "eval", "report"] {
        let o = patchsim(&run_args(sub, &corpus, &staged));
        assert_eq!(o.status.code(), Some(0), "{sub}: {}", stderr(&o));
    }
    assert_eq!(tree(&whole), tree(&staged));
}

#[test]
fn rank_without_models_fails_per_bug() {
    let dir = tempfile::tempdir().unwrap();
    let o = patchsim(&run_args(
        "rank",
        &fixture_corpus(),
        &dir.path().join("out"),
    ));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ingest_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = patchsim(&run_args("ingest", &fixture_corpus(), &out));
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stderr(&o).contains("3 bugs, 15 candidates"),
        "{}",
        stderr(&o)
    );
    assert!(out.join("corpus.json").is_file());
}

#[test]
fn tokenize_prints_one_token_per_line() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_patchsim"))
        .arg("tokenize")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"if (a.b >= 10) { s = \"x y\"; }")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    let tokens: Vec<_> = std::str::from_utf8(&o.stdout)
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect();
    assert_eq!(
        tokens,
        ["if", "(", "a.b", ">", "=", "10", ")", "{", "s", "=", "\"xy\"", ";", "}"]
    );
}

#[test]
fn tokenize_a_window_of_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("f.js");
    std::fs::write(&file, "a\nb\nc\nd\ne\n").unwrap();
    let o = patchsim(&[
        "tokenize",
        file.to_str().unwrap(),
        "--line",
        "3",
        "--radius",
        "1",
    ]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "b\nc\nd\n");
    let o = patchsim(&["tokenize", file.to_str().unwrap(), "--line", "9"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn annotate_reads_scores_from_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    copy_dir(&fixture_corpus(), &corpus);
    std::fs::remove_file(corpus.join("eslint-47/annotations.json")).unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_patchsim"))
        .args([
            "annotate",
            "--corpus",
            corpus.to_str().unwrap(),
            "--bug",
            "eslint-47",
            "--annotator",
            "me",
        ])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"2\nbogus\n1.5\ns\n-1\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("invalid score"));
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(corpus.join("eslint-47/annotations.json")).unwrap())
            .unwrap();
    assert_eq!(json["annotator"], "me");
    let scores = &json["scores"];
    assert_eq!(scores["eslint-47/developer"], 3.0);
    assert_eq!(scores["eslint-47/candidates/p01"], 2.0);
    assert_eq!(scores["eslint-47/candidates/p02"], 1.5);
    assert!(scores.get("eslint-47/candidates/p03").is_none());
    assert_eq!(scores["eslint-47/candidates/p04"], -1.0);
}

#[test]
fn eval_then_report_without_annotations_anywhere() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    copy_dir(&fixture_corpus(), &corpus);
    for bug in ["eslint-1", "eslint-217", "eslint-47"] {
        std::fs::remove_file(corpus.join(bug).join("annotations.json")).unwrap();
    }
    let out = dir.path().join("out");
    let o = patchsim(&run_args("pipeline", &corpus, &out));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(out.join("ndcg.csv").is_file());
}

#[test]
fn bad_flag_values_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture_corpus();
    let out = dir.path().join("out");
    let mut args = run_args("train", &corpus, &out);
    args.extend(["--window", "0"]);
    assert_eq!(patchsim(&args).status.code(), Some(1));
    let mut args = run_args("rank", &corpus, &out);
    args.extend(["--metric", "euclid"]);
    assert_eq!(patchsim(&args).status.code(), Some(1));
    assert_eq!(patchsim(&["--help"]).status.code(), Some(0));
}
