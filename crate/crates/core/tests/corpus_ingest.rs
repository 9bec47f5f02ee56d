mod common;

use std::fs;

use patchsim_core::corpus::{ingest_corpus, ingest_corpus_lenient, VariantKind};
use patchsim_core::Error;

use common::*;

#[test]
fn bundled_fixture_ingests() {
    let m = ingest_corpus(&fixture_corpus(), 3).unwrap();
    let ids: Vec<_> = m.bugs.iter().map(|b| b.bug_id.as_str()).collect();
    assert_eq!(ids, ["eslint-1", "eslint-217", "eslint-47"]);
    assert_eq!(m.candidate_count(), 6 + 5 + 4);
    assert!(m.bugs.iter().all(|b| b.annotation_ref.is_some()));
    let b = m.bug("eslint-47").unwrap();
    assert_eq!(b.project, "eslint");
    assert_eq!(b.candidates[0].id, "p01");
}

#[test]
fn one_bug_two_candidates() {
    let dir = tempfile::tempdir().unwrap();
    write_bug(
        dir.path(),
        "b1",
        "a\nb\nc\n",
        2,
        "a\nB\nc\n",
        &[("c1", "a\nx\nc\n"), ("c2", "a\ny\nc\n")],
    );
    let m = ingest_corpus(dir.path(), 3).unwrap();
    assert_eq!(m.bugs.len(), 1);
    assert_eq!(m.bugs[0].candidates.len(), 2);
    assert!(m.bugs[0].annotation_ref.is_none());
}

#[test]
fn duplicate_candidate_ids() {
    let dir = tempfile::tempdir().unwrap();
    write_bug(dir.path(), "b1", "a\nb\n", 1, "A\nb\n", &[("c1", "x\nb\n")]);
    fs::write(dir.path().join("b1/candidates/c1.mjs"), "y\nb\n").unwrap();
    let err = ingest_corpus(dir.path(), 3).unwrap_err();
    assert!(err.to_string().contains("duplicate candidate id"), "{err}");
}

#[test]
fn missing_files_name_the_bug() {
    let dir = tempfile::tempdir().unwrap();
    write_bug(dir.path(), "broken", "a\n", 1, "b\n", &[("c1", "c\n")]);
    fs::remove_file(dir.path().join("broken/developer.js")).unwrap();
    let err = ingest_corpus(dir.path(), 3).unwrap_err();
    let msg = err.to_string();
    assert!(
        msg.contains("broken") && msg.contains("developer.js"),
        "{msg}"
    );

    fs::write(dir.path().join("broken/developer.js"), "b\n").unwrap();
    fs::remove_file(dir.path().join("broken/original.js")).unwrap();
    assert!(ingest_corpus(dir.path(), 3)
        .unwrap_err()
        .to_string()
        .contains("original.js"));
}

#[test]
fn empty_candidates_directory() {
    let dir = tempfile::tempdir().unwrap();
    write_bug(dir.path(), "b1", "a\n", 1, "b\n", &[]);
    let err = ingest_corpus(dir.path(), 3).unwrap_err();
    assert!(
        err.to_string().contains("candidates directory is empty"),
        "{err}"
    );
}

#[test]
fn malformed_meta_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    write_bug(dir.path(), "b1", "a\n", 1, "b\n", &[("c1", "c\n")]);
    fs::write(
        dir.path().join("b1/meta.json"),
        "{\"project\": \"x\",\n \"faulty_line\": \"three\"}",
    )
    .unwrap();
    let err = ingest_corpus(dir.path(), 3).unwrap_err();
    assert!(matches!(err, Error::Meta { .. }));
    assert!(err.to_string().contains("line 2"), "{err}");

    fs::write(dir.path().join("b1/meta.json"), "{\"project\": \"x\"}").unwrap();
    assert!(ingest_corpus(dir.path(), 3)
        .unwrap_err()
        .to_string()
        .contains("faulty_line"));
}

#[test]
fn faulty_line_outside_file() {
    let dir = tempfile::tempdir().unwrap();
    write_bug(dir.path(), "b1", "a\nb\n", 3, "a\nc\n", &[("c1", "a\nd\n")]);
    assert!(ingest_corpus(dir.path(), 3).is_err());
}

#[test]
fn lenient_ingest_keeps_good_bugs() {
    let dir = tempfile::tempdir().unwrap();
    write_bug(
        dir.path(),
        "good",
        "a\nb\n",
        1,
        "A\nb\n",
        &[("c1", "x\nb\n")],
    );
    write_bug(dir.path(), "bad", "a\n", 1, "b\n", &[]);
    let (m, failures) = ingest_corpus_lenient(dir.path(), 3).unwrap();
    assert_eq!(m.bugs.len(), 1);
    assert_eq!(failures.len(), 1);
    assert_eq!(failures[0].0, "bad");
}

#[test]
fn missing_root_is_hard_error() {
    assert!(ingest_corpus_lenient(std::path::Path::new("/nonexistent/corpus"), 3).is_err());
}

#[test]
fn eslint_replica_layout_counts() {
    let dir = tempfile::tempdir().unwrap();
    write_eslint_replica(dir.path());
    let m = ingest_corpus(dir.path(), 3).unwrap();
    assert_eq!(m.bugs.len(), 10);
    for (bug_id, n) in ESLINT_BUGS {
        assert_eq!(m.bug(bug_id).unwrap().candidates.len(), n, "{bug_id}");
    }
    assert_eq!(m.candidate_count(), 465);
}

#[test]
fn deleted_line_patch_is_centred_on_divergence() {
    let m = ingest_corpus(&fixture_corpus(), 3).unwrap();
    let bug = m.bug("eslint-217").unwrap();
    let windows = bug.snippets(3).unwrap();
    let deleted = windows
        .iter()
        .find(|w| w.doc_id == "eslint-217/candidates/p05")
        .unwrap();
    assert_eq!(deleted.variant_kind, VariantKind::Candidate);
    assert_eq!(deleted.center_line, bug.faulty_line);
    assert_eq!(windows[0].center_line, bug.faulty_line);
    assert!(windows[0].text.contains("typeof option ==="));
    assert!(!deleted.text.contains("typeof"));
}
