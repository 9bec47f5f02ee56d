//! Similarity-ordered lists of patch variants per bug.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{developer_doc_id, original_doc_id, BugCase, CorpusManifest, VariantKind};
use crate::embedding::EmbeddingModel;
use crate::error::{Error, Result};
use crate::similarity::{self, Metric};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub doc_id: String,
    pub kind: VariantKind,
    pub score: f64,
    /// 1-based.
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub bug_id: String,
    pub metric: Metric,
    pub entries: Vec<RankedEntry>,
}

impl RankedList {
    /// Sort scored variants: score descending, then the developer fix before
    /// candidates, then doc id. Assigns ranks 1..n.
    pub fn from_scores(
        bug_id: impl Into<String>,
        metric: Metric,
        mut scored: Vec<(String, VariantKind, f64)>,
    ) -> Self {
        scored.sort_by(|a, b| {
            b.2.partial_cmp(&a.2)
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.1.cmp(&b.1))
                .then_with(|| a.0.cmp(&b.0))
        });
        let entries = scored
            .into_iter()
            .enumerate()
            .map(|(i, (doc_id, kind, score))| RankedEntry {
                doc_id,
                kind,
                score,
                rank: i + 1,
            })
            .collect();
        RankedList {
            bug_id: bug_id.into(),
            metric,
            entries,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn developer_rank(&self) -> Option<usize> {
        self.entries
            .iter()
            .find(|e| e.kind == VariantKind::DeveloperFix)
            .map(|e| e.rank)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Rank the developer fix and every candidate of `bug` by similarity to the
/// original snippet.
pub fn rank_bug(model: &EmbeddingModel, bug: &BugCase, metric: Metric) -> Result<RankedList> {
    let vector = |doc_id: &str| {
        model
            .doc_vector_f64(doc_id)
            .map_err(|_| Error::corpus(&bug.bug_id, format!("model has no vector for `{doc_id}`")))
    };
    let original = vector(&original_doc_id(&bug.bug_id))?;
    let scored = bug
        .variants()
        .filter(|(_, kind, _)| *kind != VariantKind::Original)
        .map(|(doc_id, kind, _)| {
            let v = vector(&doc_id)?;
            let s = similarity::score(metric, &v, &original)
                .map_err(|e| Error::corpus(&bug.bug_id, format!("{doc_id}: {e}")))?;
            Ok((doc_id, kind, s.value))
        })
        .collect::<Result<Vec<_>>>()?;
    debug_assert!(scored
        .iter()
        .any(|(id, ..)| *id == developer_doc_id(&bug.bug_id)));
    Ok(RankedList::from_scores(&bug.bug_id, metric, scored))
}

#[derive(Debug, Default)]
pub struct RankAllOutcome {
    pub rankings: Vec<RankedList>,
    pub failures: Vec<(String, Error)>,
}

/// Rank every bug of the manifest with its own model. Bugs without a model,
/// or whose ranking fails, are recorded and skipped.
pub fn rank_all(
    models: &BTreeMap<String, EmbeddingModel>,
    manifest: &CorpusManifest,
    metric: Metric,
) -> RankAllOutcome {
    let mut out = RankAllOutcome::default();
    for bug in &manifest.bugs {
        let result = models
            .get(&bug.bug_id)
            .ok_or_else(|| Error::corpus(&bug.bug_id, "no trained model"))
            .and_then(|m| rank_bug(m, bug, metric));
        match result {
            Ok(r) => out.rankings.push(r),
            Err(e) => out.failures.push((bug.bug_id.clone(), e)),
        }
    }
    out
}
