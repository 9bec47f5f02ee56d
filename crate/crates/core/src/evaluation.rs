//! Relevance annotations and nDCG evaluation of ranked lists.
//!
//! Relevance scale: 3 developer fix, 2 syntactic match, 1 semantic match,
//! 0 uncertain, -1 incorrect. Half steps in between are allowed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{developer_doc_id, BugCase, VariantKind};
use crate::error::{Error, Result};
use crate::ranking::RankedList;
use crate::tokenizer::normalize_whitespace;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct RelevanceScore(f64);

impl RelevanceScore {
    pub const DEVELOPER_FIX: RelevanceScore = RelevanceScore(3.0);
    pub const SYNTACTIC_MATCH: RelevanceScore = RelevanceScore(2.0);
    pub const SEMANTIC_MATCH: RelevanceScore = RelevanceScore(1.0);
    pub const UNCERTAIN: RelevanceScore = RelevanceScore(0.0);
    pub const INCORRECT: RelevanceScore = RelevanceScore(-1.0);

    pub fn new(value: f64) -> Result<Self> {
        let doubled = value * 2.0;
        if (-1.0..=3.0).contains(&value) && doubled == doubled.round() {
            Ok(RelevanceScore(value))
        } else {
            Err(Error::InvalidRelevance(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for RelevanceScore {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        RelevanceScore::new(value)
    }
}

impl From<RelevanceScore> for f64 {
    fn from(r: RelevanceScore) -> f64 {
        r.0
    }
}

impl fmt::Display for RelevanceScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One annotator's relevance scores for one bug, keyed by doc id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub bug_id: String,
    #[serde(rename = "annotator")]
    pub annotator_id: String,
    pub scores: BTreeMap<String, RelevanceScore>,
}

impl AnnotationSet {
    pub fn new(bug_id: impl Into<String>, annotator_id: impl Into<String>) -> Self {
        AnnotationSet {
            bug_id: bug_id.into(),
            annotator_id: annotator_id.into(),
            scores: BTreeMap::new(),
        }
    }

    pub fn get(&self, doc_id: &str) -> Option<RelevanceScore> {
        self.scores.get(doc_id).copied()
    }

    pub fn insert(&mut self, doc_id: impl Into<String>, score: RelevanceScore) {
        self.scores.insert(doc_id.into(), score);
    }

    /// The developer fix, when scored, must carry 3.
    pub fn validate(&self) -> Result<()> {
        let dev = developer_doc_id(&self.bug_id);
        match self.get(&dev) {
            Some(s) if s != RelevanceScore::DEVELOPER_FIX => Err(Error::Annotation {
                bug_id: self.bug_id.clone(),
                message: format!("developer fix `{dev}` scored {s}, expected 3"),
            }),
            _ => Ok(()),
        }
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let set: AnnotationSet = serde_json::from_str(&text)?;
        set.validate()?;
        Ok(set)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// Equal after removing all whitespace.
pub fn syntactic_match(a: &str, b: &str) -> bool {
    normalize_whitespace(a) == normalize_whitespace(b)
}

/// Candidates of `bug` that syntactically match its developer fix.
pub fn count_syntactic_matches(bug: &BugCase) -> usize {
    let dev = normalize_whitespace(&bug.developer_fix_source);
    bug.candidates
        .iter()
        .filter(|c| normalize_whitespace(&c.source) == dev)
        .count()
}

fn check_cutoff(len: usize, p: usize) -> Result<()> {
    if p == 0 || p > len {
        return Err(Error::InvalidCutoff { p, len });
    }
    Ok(())
}

/// `sum_{i=1..p} (2^rel_i - 1) / log2(i + 1)` with a real-valued power.
pub fn dcg(relevances: &[f64], p: usize) -> Result<f64> {
    check_cutoff(relevances.len(), p)?;
    Ok(relevances[..p]
        .iter()
        .enumerate()
        .map(|(i, &rel)| (rel.exp2() - 1.0) / ((i + 2) as f64).log2())
        .sum())
}

/// DCG of the relevances sorted in descending order.
pub fn idcg(relevances: &[f64], p: usize) -> Result<f64> {
    check_cutoff(relevances.len(), p)?;
    let mut ideal = relevances.to_vec();
    ideal.sort_by(|a, b| b.total_cmp(a));
    dcg(&ideal, p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ndcg {
    pub dcg: f64,
    pub idcg: f64,
    pub ndcg: f64,
    /// `idcg <= 0`; `ndcg` is then reported as 0.
    pub idcg_non_positive: bool,
}

pub fn ndcg(ranked_relevances: &[f64], p: usize) -> Result<Ndcg> {
    let dcg = dcg(ranked_relevances, p)?;
    let idcg = idcg(ranked_relevances, p)?;
    let idcg_non_positive = idcg <= 0.0;
    Ok(Ndcg {
        dcg,
        idcg,
        ndcg: if idcg_non_positive { 0.0 } else { dcg / idcg },
        idcg_non_positive,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalFlag {
    SyntacticMatchPresent,
    IdcgNonPositive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub bug_id: String,
    pub p: usize,
    pub dcg: f64,
    pub idcg: f64,
    pub ndcg: f64,
    pub flags: BTreeSet<EvalFlag>,
}

/// Score a ranking against its annotations over the whole list.
///
/// The developer fix counts as relevance 3 even when the annotation file
/// leaves it out. Every other entry must be annotated.
pub fn evaluate_bug(ranked: &RankedList, annotations: &AnnotationSet) -> Result<EvalResult> {
    annotations.validate()?;
    let mut missing = Vec::new();
    let mut rels = Vec::with_capacity(ranked.len());
    let mut flags = BTreeSet::new();
    for e in &ranked.entries {
        let rel = match (annotations.get(&e.doc_id), e.kind) {
            (Some(r), _) => r,
            (None, VariantKind::DeveloperFix) => RelevanceScore::DEVELOPER_FIX,
            (None, _) => {
                missing.push(e.doc_id.clone());
                continue;
            }
        };
        if e.kind == VariantKind::Candidate && rel == RelevanceScore::SYNTACTIC_MATCH {
            flags.insert(EvalFlag::SyntacticMatchPresent);
        }
        rels.push(rel.value());
    }
    if !missing.is_empty() {
        return Err(Error::MissingAnnotations {
            bug_id: ranked.bug_id.clone(),
            missing,
        });
    }

    let p = rels.len();
    let n = ndcg(&rels, p)?;
    if n.idcg_non_positive {
        flags.insert(EvalFlag::IdcgNonPositive);
    }
    Ok(EvalResult {
        bug_id: ranked.bug_id.clone(),
        p,
        dcg: n.dcg,
        idcg: n.idcg,
        ndcg: n.ndcg,
        flags,
    })
}

/// Combine two independent annotations; disagreements are settled by the
/// arbiter.
pub fn merge_annotations(
    a: &AnnotationSet,
    b: &AnnotationSet,
    arbiter: &AnnotationSet,
) -> Result<AnnotationSet> {
    if a.bug_id != b.bug_id || a.bug_id != arbiter.bug_id {
        return Err(Error::Annotation {
            bug_id: a.bug_id.clone(),
            message: format!(
                "annotation sets belong to different bugs ({}, {}, {})",
                a.bug_id, b.bug_id, arbiter.bug_id
            ),
        });
    }
    let a_ids: BTreeSet<_> = a.scores.keys().collect();
    let b_ids: BTreeSet<_> = b.scores.keys().collect();
    if a_ids != b_ids {
        let diff: Vec<String> = a_ids
            .symmetric_difference(&b_ids)
            .map(|s| s.to_string())
            .collect();
        return Err(Error::Annotation {
            bug_id: a.bug_id.clone(),
            message: format!("annotators cover different documents: {}", diff.join(", ")),
        });
    }

    let mut merged = AnnotationSet::new(
        &a.bug_id,
        format!(
            "{}+{}/{}",
            a.annotator_id, b.annotator_id, arbiter.annotator_id
        ),
    );
    let mut unresolved = Vec::new();
    for (doc_id, &sa) in &a.scores {
        let sb = b.scores[doc_id];
        if sa == sb {
            merged.insert(doc_id, sa);
        } else if let Some(s) = arbiter.get(doc_id) {
            merged.insert(doc_id, s);
        } else {
            unresolved.push(doc_id.clone());
        }
    }
    if !unresolved.is_empty() {
        return Err(Error::UnresolvedDisagreement(unresolved));
    }
    merged.validate()?;
    Ok(merged)
}
