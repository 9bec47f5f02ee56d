//! Bug corpus ingestion and snippet-window extraction.
//!
//! On-disk layout, one directory per bug:
//!
//! ```text
//! <root>/<bug-id>/meta.json        {"project": str, "faulty_line": int}
//! <root>/<bug-id>/original.js
//! <root>/<bug-id>/developer.js
//! <root>/<bug-id>/candidates/<candidate-id>.js
//! <root>/<bug-id>/annotations.json (optional)
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_RADIUS: usize = 3;

pub const META_FILE: &str = "meta.json";
pub const ORIGINAL_FILE: &str = "original.js";
pub const DEVELOPER_FILE: &str = "developer.js";
pub const CANDIDATES_DIR: &str = "candidates";
pub const ANNOTATIONS_FILE: &str = "annotations.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    Original,
    DeveloperFix,
    Candidate,
}

impl fmt::Display for VariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VariantKind::Original => "original",
            VariantKind::DeveloperFix => "developer_fix",
            VariantKind::Candidate => "candidate",
        })
    }
}

pub fn original_doc_id(bug_id: &str) -> String {
    format!("{bug_id}/original")
}

pub fn developer_doc_id(bug_id: &str) -> String {
    format!("{bug_id}/developer")
}

pub fn candidate_doc_id(bug_id: &str, candidate_id: &str) -> String {
    format!("{bug_id}/candidates/{candidate_id}")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: String,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugCase {
    pub bug_id: String,
    pub project: String,
    pub original_source: String,
    /// 1-based.
    pub faulty_line: usize,
    pub developer_fix_source: String,
    pub candidates: Vec<Candidate>,
    pub annotation_ref: Option<PathBuf>,
}

impl BugCase {
    /// Checks the structural invariants: faulty line inside the original,
    /// at least one candidate, unique candidate ids.
    pub fn validate(&self) -> Result<()> {
        let line_count = split_lines(&self.original_source).len();
        if self.faulty_line == 0 || self.faulty_line > line_count {
            return Err(Error::corpus(
                &self.bug_id,
                format!(
                    "faulty_line {} outside original.js ({} lines)",
                    self.faulty_line, line_count
                ),
            ));
        }
        if self.candidates.is_empty() {
            return Err(Error::corpus(&self.bug_id, "no candidates"));
        }
        let mut seen = BTreeSet::new();
        for c in &self.candidates {
            if !seen.insert(c.id.as_str()) {
                return Err(Error::corpus(
                    &self.bug_id,
                    format!("duplicate candidate id `{}`", c.id),
                ));
            }
        }
        Ok(())
    }

    /// Every variant of the bug as (doc_id, kind, source), original first,
    /// then the developer fix, then candidates in stored order.
    pub fn variants(&self) -> impl Iterator<Item = (String, VariantKind, &str)> + '_ {
        [
            (
                original_doc_id(&self.bug_id),
                VariantKind::Original,
                self.original_source.as_str(),
            ),
            (
                developer_doc_id(&self.bug_id),
                VariantKind::DeveloperFix,
                self.developer_fix_source.as_str(),
            ),
        ]
        .into_iter()
        .chain(self.candidates.iter().map(|c| {
            (
                candidate_doc_id(&self.bug_id, &c.id),
                VariantKind::Candidate,
                c.source.as_str(),
            )
        }))
    }

    /// Snippet windows for all variants. Patched variants are centred on
    /// their first line that differs from the original.
    pub fn snippets(&self, radius: usize) -> Result<Vec<SnippetWindow>> {
        self.variants()
            .map(|(doc_id, kind, source)| {
                let center = match kind {
                    VariantKind::Original => self.faulty_line,
                    _ => locate_patched_line(&self.original_source, source, self.faulty_line),
                };
                // a patch that truncates the file can move the divergence
                // point past its last line
                let center = center.clamp(1, split_lines(source).len().max(1));
                extract_snippet(source, center, radius, doc_id, kind)
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::corpus(&self.bug_id, e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnippetWindow {
    pub doc_id: String,
    pub variant_kind: VariantKind,
    pub center_line: usize,
    pub first_line: usize,
    pub text: String,
}

impl SnippetWindow {
    pub fn line_count(&self) -> usize {
        split_lines(&self.text).len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub root: PathBuf,
    pub radius: usize,
    pub bugs: Vec<BugCase>,
}

impl CorpusManifest {
    pub fn bug(&self, bug_id: &str) -> Option<&BugCase> {
        self.bugs.iter().find(|b| b.bug_id == bug_id)
    }

    pub fn candidate_count(&self) -> usize {
        self.bugs.iter().map(|b| b.candidates.len()).sum()
    }
}

/// Split on LF, dropping one trailing CR per line. A final newline does not
/// start an extra line.
pub fn split_lines(source: &str) -> Vec<&str> {
    let body = source.strip_suffix('\n').unwrap_or(source);
    if body.is_empty() && !source.is_empty() {
        return vec![""];
    }
    if source.is_empty() {
        return Vec::new();
    }
    body.split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .collect()
}

/// Lines `[center - radius, center + radius]` clamped to the file, joined
/// with `\n`. No padding at the file boundaries.
pub fn extract_snippet(
    source: &str,
    center_line: usize,
    radius: usize,
    doc_id: impl Into<String>,
    variant_kind: VariantKind,
) -> Result<SnippetWindow> {
    let lines = split_lines(source);
    if center_line == 0 || center_line > lines.len() {
        return Err(Error::LineOutOfRange {
            line: center_line,
            line_count: lines.len(),
        });
    }
    let first = center_line.saturating_sub(radius).max(1);
    let last = (center_line + radius).min(lines.len());
    Ok(SnippetWindow {
        doc_id: doc_id.into(),
        variant_kind,
        center_line,
        first_line: first,
        text: lines[first - 1..last].join("\n"),
    })
}

/// 1-based index of the first line where the two sources differ, or
/// `faulty_line` when they agree line by line.
pub fn locate_patched_line(original: &str, patched: &str, faulty_line: usize) -> usize {
    let a = split_lines(original);
    let b = split_lines(patched);
    let common = a.len().min(b.len());
    match (0..common).find(|&i| a[i] != b[i]) {
        Some(i) => i + 1,
        None if a.len() != b.len() => common + 1,
        None => faulty_line,
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Meta {
    project: String,
    faulty_line: usize,
}

fn read_text(path: &Path, bug_id: &str, what: &str) -> Result<String> {
    if !path.is_file() {
        return Err(Error::corpus(
            bug_id,
            format!("missing {what} ({})", path.display()),
        ));
    }
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Read one bug directory.
pub fn load_bug(dir: &Path) -> Result<BugCase> {
    let bug_id = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();

    let meta_path = dir.join(META_FILE);
    let meta_text = read_text(&meta_path, &bug_id, META_FILE)?;
    let meta: Meta = serde_json::from_str(&meta_text).map_err(|e| Error::Meta {
        bug_id: bug_id.clone(),
        path: meta_path.clone(),
        message: e.to_string(),
    })?;

    let original_source = read_text(&dir.join(ORIGINAL_FILE), &bug_id, ORIGINAL_FILE)?;
    let developer_fix_source = read_text(&dir.join(DEVELOPER_FILE), &bug_id, DEVELOPER_FILE)?;

    let cand_dir = dir.join(CANDIDATES_DIR);
    if !cand_dir.is_dir() {
        return Err(Error::corpus(&bug_id, "missing candidates directory"));
    }
    let mut paths = Vec::new();
    for entry in fs::read_dir(&cand_dir).map_err(|e| Error::io(&cand_dir, e))? {
        let entry = entry.map_err(|e| Error::io(&cand_dir, e))?;
        let path = entry.path();
        if path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(Error::corpus(&bug_id, "candidates directory is empty"));
    }
    let mut candidates = Vec::with_capacity(paths.len());
    for path in paths {
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let source = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        candidates.push(Candidate { id, source });
    }

    let annotations = dir.join(ANNOTATIONS_FILE);
    let bug = BugCase {
        bug_id,
        project: meta.project,
        original_source,
        faulty_line: meta.faulty_line,
        developer_fix_source,
        candidates,
        annotation_ref: annotations.is_file().then_some(annotations),
    };
    bug.validate()?;
    Ok(bug)
}

/// Bug directories under `root`, sorted by name.
pub fn bug_dirs(root: &Path) -> Result<Vec<PathBuf>> {
    if !root.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "corpus root is not a directory",
            ),
        ));
    }
    let mut dirs = Vec::new();
    for entry in fs::read_dir(root).map_err(|e| Error::io(root, e))? {
        let path = entry.map_err(|e| Error::io(root, e))?.path();
        let hidden = path
            .file_name()
            .is_some_and(|n| n.to_string_lossy().starts_with('.'));
        if path.is_dir() && !hidden {
            dirs.push(path);
        }
    }
    dirs.sort();
    Ok(dirs)
}

/// Ingest every bug, collecting per-bug failures instead of stopping at the
/// first one. Only an unreadable root is a hard error.
pub fn ingest_corpus_lenient(
    root: &Path,
    radius: usize,
) -> Result<(CorpusManifest, Vec<(String, Error)>)> {
    let mut bugs = Vec::new();
    let mut failures = Vec::new();
    for dir in bug_dirs(root)? {
        match load_bug(&dir) {
            Ok(bug) => bugs.push(bug),
            Err(e) => {
                let id = dir
                    .file_name()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned();
                failures.push((id, e));
            }
        }
    }
    Ok((
        CorpusManifest {
            root: root.to_path_buf(),
            radius,
            bugs,
        },
        failures,
    ))
}

/// Ingest every bug under `root`; the first malformed bug is an error.
pub fn ingest_corpus(root: &Path, radius: usize) -> Result<CorpusManifest> {
    let (manifest, mut failures) = ingest_corpus_lenient(root, radius)?;
    if !failures.is_empty() {
        return Err(failures.swap_remove(0).1);
    }
    Ok(manifest)
}
