//! Machine- and human-readable outputs: the per-bug summary CSV and SVG
//! charts.

mod svg;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use svg::{render_ndcg_chart, render_similarity_chart};

use crate::corpus::CorpusManifest;
use crate::error::{Error, Result};
use crate::evaluation::{count_syntactic_matches, AnnotationSet, EvalResult};
use crate::ranking::RankedList;

/// Column order of `ndcg.csv`.
pub const CSV_HEADER: [&str; 7] = [
    "bug_id",
    "candidates",
    "dev_fix_rank",
    "dcg",
    "idcg",
    "ndcg",
    "syntactic_matches",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugSummary {
    pub bug_id: String,
    pub candidates: usize,
    pub syntactic_matches: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub bugs: Vec<BugSummary>,
    pub rankings: Vec<RankedList>,
    pub evals: Vec<EvalResult>,
}

impl ReportBundle {
    pub fn new(
        manifest: &CorpusManifest,
        rankings: Vec<RankedList>,
        evals: Vec<EvalResult>,
    ) -> Result<Self> {
        for e in &evals {
            if !rankings.iter().any(|r| r.bug_id == e.bug_id) {
                return Err(Error::corpus(&e.bug_id, "evaluation without a ranking"));
            }
        }
        let bugs = manifest
            .bugs
            .iter()
            .map(|b| BugSummary {
                bug_id: b.bug_id.clone(),
                candidates: b.candidates.len(),
                syntactic_matches: count_syntactic_matches(b),
            })
            .collect();
        Ok(ReportBundle {
            bugs,
            rankings,
            evals,
        })
    }

    pub fn candidate_total(&self) -> usize {
        self.bugs.iter().map(|b| b.candidates).sum()
    }

    pub fn syntactic_match_total(&self) -> usize {
        self.bugs.iter().map(|b| b.syntactic_matches).sum()
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn emit_ndcg_chart(evals: &[EvalResult], path: &Path) -> Result<()> {
    if evals.is_empty() {
        return Err(Error::NothingToReport("no evaluations to chart"));
    }
    write_file(path, &render_ndcg_chart(evals))
}

pub fn emit_similarity_chart(
    ranked: &RankedList,
    annotations: Option<&AnnotationSet>,
    path: &Path,
) -> Result<()> {
    if ranked.is_empty() {
        return Err(Error::NothingToReport("empty ranking"));
    }
    write_file(path, &render_similarity_chart(ranked, annotations))
}

/// One row per bug in [`CSV_HEADER`] order. Bugs without a ranking or an
/// evaluation leave those cells empty. Reals are printed with 6 decimals.
pub fn render_summary_csv(bundle: &ReportBundle) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for bug in &bundle.bugs {
        let rank = bundle
            .rankings
            .iter()
            .find(|r| r.bug_id == bug.bug_id)
            .and_then(RankedList::developer_rank)
            .map(|r| r.to_string())
            .unwrap_or_default();
        let eval = bundle.evals.iter().find(|e| e.bug_id == bug.bug_id);
        let real =
            |f: fn(&EvalResult) -> f64| eval.map(|e| format!("{:.6}", f(e))).unwrap_or_default();
        w.write_record([
            bug.bug_id.clone(),
            bug.candidates.to_string(),
            rank,
            real(|e| e.dcg),
            real(|e| e.idcg),
            real(|e| e.ndcg),
            bug.syntactic_matches.to_string(),
        ])?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::io("<csv buffer>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn emit_summary_csv(bundle: &ReportBundle, path: &Path) -> Result<()> {
    write_file(path, &render_summary_csv(bundle)?)
}
