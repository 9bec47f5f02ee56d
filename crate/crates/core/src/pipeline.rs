//! End-to-end orchestration: ingest, tokenize, train per bug, rank,
//! evaluate, report. Every stage persists its artifacts under the output
//! root so stages can be rerun independently.
//!
//! Output tree:
//!
//! ```text
//! out/run-config.json
//! out/corpus.json
//! out/models/<bug-id>.pvdm
//! out/rankings/<bug-id>.json
//! out/evals.json
//! out/ndcg.csv
//! out/charts/ndcg.svg
//! out/charts/<bug-id>.svg
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{
    self, developer_doc_id, split_lines, BugCase, CorpusManifest, ANNOTATIONS_FILE,
};
use crate::embedding::{self, EmbeddingConfig, EmbeddingModel};
use crate::error::{Error, Result};
use crate::evaluation::{evaluate_bug, AnnotationSet, EvalResult, RelevanceScore};
use crate::ranking::{self, RankedList};
use crate::report::{self, ReportBundle};
use crate::similarity::Metric;
use crate::tokenizer::TokenSequence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub corpus: PathBuf,
    /// Not echoed into `run-config.json`, so identical runs into different
    /// directories produce identical trees.
    #[serde(skip)]
    pub out: PathBuf,
    pub embedding: EmbeddingConfig,
    pub radius: usize,
    pub metric: Metric,
    /// Directory of extra `.js` files added to every bug's training corpus.
    pub aux: Option<PathBuf>,
    pub nondeterministic_parallel: bool,
}

impl RunConfig {
    pub fn new(corpus: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            corpus: corpus.into(),
            out: out.into(),
            embedding: EmbeddingConfig::default(),
            radius: corpus::DEFAULT_RADIUS,
            metric: Metric::default(),
            aux: None,
            nondeterministic_parallel: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.embedding.validate()?;
        if self.nondeterministic_parallel == self.embedding.deterministic {
            return Err(Error::InvalidConfig(
                "deterministic training conflicts with parallel mode".into(),
            ));
        }
        Ok(())
    }

    fn models_dir(&self) -> PathBuf {
        self.out.join("models")
    }

    fn rankings_dir(&self) -> PathBuf {
        self.out.join("rankings")
    }

    fn charts_dir(&self) -> PathBuf {
        self.out.join("charts")
    }
}

/// Per-bug failures and informational notices from a run. Hard errors are
/// returned as `Err` instead.
#[derive(Debug, Default)]
pub struct RunReport {
    pub failures: Vec<(String, Error)>,
    pub notices: Vec<String>,
}

impl RunReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }

    fn absorb(&mut self, other: RunReport) {
        self.failures.extend(other.failures);
        self.notices.extend(other.notices);
    }
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_run_config(cfg: &RunConfig) -> Result<()> {
    create_dir(&cfg.out)?;
    write_json(&cfg.out.join("run-config.json"), cfg)
}

#[derive(Debug, Serialize, Deserialize)]
struct CorpusRecord {
    radius: usize,
    bugs: Vec<BugRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct BugRecord {
    bug_id: String,
    project: String,
    faulty_line: usize,
    candidates: Vec<String>,
    annotated: bool,
}

/// Read and validate the corpus; writes `corpus.json`.
pub fn ingest(cfg: &RunConfig) -> Result<(CorpusManifest, RunReport)> {
    let (manifest, failures) = corpus::ingest_corpus_lenient(&cfg.corpus, cfg.radius)?;
    create_dir(&cfg.out)?;
    let record = CorpusRecord {
        radius: manifest.radius,
        bugs: manifest
            .bugs
            .iter()
            .map(|b| BugRecord {
                bug_id: b.bug_id.clone(),
                project: b.project.clone(),
                faulty_line: b.faulty_line,
                candidates: b.candidates.iter().map(|c| c.id.clone()).collect(),
                annotated: b.annotation_ref.is_some(),
            })
            .collect(),
    };
    write_json(&cfg.out.join("corpus.json"), &record)?;
    Ok((
        manifest,
        RunReport {
            failures,
            notices: Vec::new(),
        },
    ))
}

/// Every `.js` file under `dir`, one document each, ids `aux/<relative path>`.
pub fn load_aux_documents(dir: &Path) -> Result<Vec<TokenSequence>> {
    let mut docs = Vec::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| Error::io(dir, std::io::Error::other(e.to_string())))?;
        let path = entry.path();
        if !entry.file_type().is_file() || path.extension().is_none_or(|e| e != "js") {
            continue;
        }
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let rel = path.strip_prefix(dir).unwrap_or(path);
        docs.push(TokenSequence::from_text(
            format!("aux/{}", rel.to_string_lossy().replace('\\', "/")),
            &text,
        ));
    }
    Ok(docs)
}

/// Token sequences of every snippet window of `bug`, followed by `aux`.
pub fn bug_documents(
    bug: &BugCase,
    radius: usize,
    aux: &[TokenSequence],
) -> Result<Vec<TokenSequence>> {
    let mut docs: Vec<TokenSequence> = bug
        .snippets(radius)?
        .into_iter()
        .map(|w| TokenSequence::from_text(w.doc_id, &w.text))
        .collect();
    docs.extend_from_slice(aux);
    Ok(docs)
}

fn model_path(cfg: &RunConfig, bug_id: &str) -> PathBuf {
    cfg.models_dir().join(format!("{bug_id}.pvdm"))
}

/// Train one model per bug and save it under `models/`.
pub fn train_stage(
    cfg: &RunConfig,
    manifest: &CorpusManifest,
) -> Result<(BTreeMap<String, EmbeddingModel>, RunReport)> {
    let aux = match &cfg.aux {
        Some(dir) => load_aux_documents(dir)?,
        None => Vec::new(),
    };
    create_dir(&cfg.models_dir())?;

    let train_one = |bug: &BugCase| -> Result<EmbeddingModel> {
        let docs = bug_documents(bug, manifest.radius, &aux)?;
        let model = embedding::train(&docs, &cfg.embedding)
            .map_err(|e| Error::corpus(&bug.bug_id, e.to_string()))?;
        model.save(&model_path(cfg, &bug.bug_id))?;
        Ok(model)
    };
    let results: Vec<Result<EmbeddingModel>> = if cfg.nondeterministic_parallel {
        manifest.bugs.par_iter().map(train_one).collect()
    } else {
        manifest.bugs.iter().map(train_one).collect()
    };

    let mut models = BTreeMap::new();
    let mut report = RunReport::default();
    for (bug, result) in manifest.bugs.iter().zip(results) {
        match result {
            Ok(m) => {
                models.insert(bug.bug_id.clone(), m);
            }
            Err(e) => report.failures.push((bug.bug_id.clone(), e)),
        }
    }
    Ok((models, report))
}

/// Load every model saved by [`train_stage`] for the bugs of `manifest`.
pub fn load_models(
    cfg: &RunConfig,
    manifest: &CorpusManifest,
) -> (BTreeMap<String, EmbeddingModel>, RunReport) {
    let mut models = BTreeMap::new();
    let mut report = RunReport::default();
    for bug in &manifest.bugs {
        match EmbeddingModel::load(&model_path(cfg, &bug.bug_id)) {
            Ok(m) => {
                models.insert(bug.bug_id.clone(), m);
            }
            Err(e) => report.failures.push((bug.bug_id.clone(), e)),
        }
    }
    (models, report)
}

/// Rank every bug with its model; writes `rankings/<bug-id>.json`.
pub fn rank_stage(
    cfg: &RunConfig,
    manifest: &CorpusManifest,
    models: &BTreeMap<String, EmbeddingModel>,
) -> Result<(Vec<RankedList>, RunReport)> {
    create_dir(&cfg.rankings_dir())?;
    let outcome = ranking::rank_all(models, manifest, cfg.metric);
    for r in &outcome.rankings {
        r.write_json(&cfg.rankings_dir().join(format!("{}.json", r.bug_id)))?;
    }
    Ok((
        outcome.rankings,
        RunReport {
            failures: outcome.failures,
            notices: Vec::new(),
        },
    ))
}

pub fn load_rankings(cfg: &RunConfig, manifest: &CorpusManifest) -> (Vec<RankedList>, RunReport) {
    let mut rankings = Vec::new();
    let mut report = RunReport::default();
    for bug in &manifest.bugs {
        let path = cfg.rankings_dir().join(format!("{}.json", bug.bug_id));
        match RankedList::read_json(&path) {
            Ok(r) => rankings.push(r),
            Err(e) => report.failures.push((bug.bug_id.clone(), e)),
        }
    }
    (rankings, report)
}

pub fn load_annotations(bug: &BugCase) -> Option<Result<AnnotationSet>> {
    bug.annotation_ref.as_deref().map(|path| {
        let set = AnnotationSet::read_json(path)?;
        if set.bug_id != bug.bug_id {
            return Err(Error::Annotation {
                bug_id: bug.bug_id.clone(),
                message: format!("annotation file names bug `{}`", set.bug_id),
            });
        }
        Ok(set)
    })
}

/// Evaluate every ranking whose bug carries annotations; writes
/// `evals.json`. Unannotated bugs are skipped with a notice.
pub fn eval_stage(
    cfg: &RunConfig,
    manifest: &CorpusManifest,
    rankings: &[RankedList],
) -> Result<(Vec<EvalResult>, RunReport)> {
    let mut evals = Vec::new();
    let mut report = RunReport::default();
    for ranked in rankings {
        let Some(bug) = manifest.bug(&ranked.bug_id) else {
            continue;
        };
        let result = match load_annotations(bug) {
            None => {
                report.notices.push(format!(
                    "bug `{}`: no annotations, evaluation skipped",
                    bug.bug_id
                ));
                continue;
            }
            Some(a) => a.and_then(|a| evaluate_bug(ranked, &a)),
        };
        match result {
            Ok(e) => evals.push(e),
            Err(e) => report.failures.push((bug.bug_id.clone(), e)),
        }
    }
    create_dir(&cfg.out)?;
    write_json(&cfg.out.join("evals.json"), &evals)?;
    Ok((evals, report))
}

/// Write `ndcg.csv` and the charts.
pub fn report_stage(
    cfg: &RunConfig,
    manifest: &CorpusManifest,
    rankings: Vec<RankedList>,
    evals: Vec<EvalResult>,
) -> Result<RunReport> {
    let mut report = RunReport::default();
    let bundle = ReportBundle::new(manifest, rankings, evals)?;
    report::emit_summary_csv(&bundle, &cfg.out.join("ndcg.csv"))?;
    let charts = cfg.charts_dir();
    create_dir(&charts)?;
    if bundle.evals.is_empty() {
        report
            .notices
            .push("no evaluations, nDCG chart skipped".to_owned());
    } else {
        report::emit_ndcg_chart(&bundle.evals, &charts.join("ndcg.svg"))?;
    }
    for ranked in &bundle.rankings {
        let annotations = manifest
            .bug(&ranked.bug_id)
            .and_then(load_annotations)
            .and_then(Result::ok);
        report::emit_similarity_chart(
            ranked,
            annotations.as_ref(),
            &charts.join(format!("{}.svg", ranked.bug_id)),
        )?;
    }
    Ok(report)
}

pub fn load_evals(cfg: &RunConfig) -> Result<Vec<EvalResult>> {
    read_json(&cfg.out.join("evals.json"))
}

/// Run every stage in order. Per-bug failures are collected in the report;
/// bugs that fail a stage drop out of the later ones.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    write_run_config(cfg)?;
    let mut report = RunReport::default();

    let (manifest, r) = ingest(cfg)?;
    report.absorb(r);
    let (models, r) = train_stage(cfg, &manifest)?;
    report.absorb(r);
    let (rankings, r) = rank_stage(cfg, &manifest, &models)?;
    report.absorb(r);
    let (evals, r) = eval_stage(cfg, &manifest, &rankings)?;
    report.absorb(r);
    report.absorb(report_stage(cfg, &manifest, rankings, evals)?);
    Ok(report)
}

/// Lines removed from `original` and added in `patched`, found by trimming
/// the common prefix and suffix.
pub fn line_diff(original: &str, patched: &str) -> (Vec<String>, Vec<String>) {
    let a = split_lines(original);
    let b = split_lines(patched);
    let prefix = a.iter().zip(&b).take_while(|(x, y)| x == y).count();
    let suffix = a[prefix..]
        .iter()
        .rev()
        .zip(b[prefix..].iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    let removed = a[prefix..a.len() - suffix]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let added = b[prefix..b.len() - suffix]
        .iter()
        .map(|s| s.to_string())
        .collect();
    (removed, added)
}

fn show_diff(
    prompt: &mut dyn Write,
    label: &str,
    original: &str,
    patched: &str,
) -> std::io::Result<()> {
    let (removed, added) = line_diff(original, patched);
    writeln!(prompt, "{label}:")?;
    if removed.is_empty() && added.is_empty() {
        writeln!(prompt, "  (identical to original)")?;
    }
    for l in removed {
        writeln!(prompt, "  - {l}")?;
    }
    for l in added {
        writeln!(prompt, "  + {l}")?;
    }
    Ok(())
}

/// Interactively score every candidate of `bug` not yet present in
/// `existing`. Accepts a relevance value, `s` to skip, or `q` to stop; end of
/// input also stops. The developer fix is always recorded as 3.
pub fn annotate_bug(
    bug: &BugCase,
    existing: Option<AnnotationSet>,
    annotator: &str,
    input: &mut dyn BufRead,
    prompt: &mut dyn Write,
) -> Result<AnnotationSet> {
    let io_err = |e| Error::io("<terminal>", e);
    let mut set = existing.unwrap_or_else(|| AnnotationSet::new(&bug.bug_id, annotator));
    set.insert(developer_doc_id(&bug.bug_id), RelevanceScore::DEVELOPER_FIX);

    let faulty = split_lines(&bug.original_source)
        .get(bug.faulty_line - 1)
        .copied()
        .unwrap_or_default();
    let pending: Vec<_> = bug
        .candidates
        .iter()
        .map(|c| (corpus::candidate_doc_id(&bug.bug_id, &c.id), c))
        .filter(|(id, _)| set.get(id).is_none())
        .collect();

    'candidates: for (i, (doc_id, cand)) in pending.iter().enumerate() {
        (|| -> std::io::Result<()> {
            writeln!(prompt, "\n[{}/{}] {doc_id}", i + 1, pending.len())?;
            writeln!(prompt, "original line {}: {faulty}", bug.faulty_line)?;
            show_diff(
                prompt,
                "developer fix",
                &bug.original_source,
                &bug.developer_fix_source,
            )?;
            show_diff(prompt, "candidate", &bug.original_source, &cand.source)
        })()
        .map_err(io_err)?;

        loop {
            write!(prompt, "score [3,2,1,0,-1, half steps; s=skip, q=quit]: ")
                .and_then(|_| prompt.flush())
                .map_err(io_err)?;
            let mut line = String::new();
            if input.read_line(&mut line).map_err(io_err)? == 0 {
                break 'candidates;
            }
            match line.trim() {
                "q" => break 'candidates,
                "s" => continue 'candidates,
                text => match text
                    .parse::<f64>()
                    .map_err(|_| ())
                    .and_then(|v| RelevanceScore::new(v).map_err(|_| ()))
                {
                    Ok(score) => {
                        set.insert(doc_id.clone(), score);
                        continue 'candidates;
                    }
                    Err(()) => writeln!(prompt, "invalid score `{text}`").map_err(io_err)?,
                },
            }
        }
    }
    Ok(set)
}

/// Path of the annotation file for `bug` under the corpus root.
pub fn annotations_path(root: &Path, bug_id: &str) -> PathBuf {
    root.join(bug_id).join(ANNOTATIONS_FILE)
}
