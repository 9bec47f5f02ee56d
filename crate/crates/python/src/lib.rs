//! Python bindings for `patchsim_core`.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use patchsim_core::corpus::{self, VariantKind};
use patchsim_core::evaluation::count_syntactic_matches;
use patchsim_core::similarity::{self, COSMUL_EPSILON};
use patchsim_core::{EmbeddingConfig, EmbeddingModel, Error, Metric, RunConfig, TokenSequence};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_metric(metric: &str) -> PyResult<Metric> {
    metric.parse().map_err(|e: String| PyValueError::new_err(e))
}

#[pyfunction]
fn tokenize(text: &str) -> Vec<String> {
    patchsim_core::tokenize(text)
}

#[pyfunction]
fn normalize_whitespace(text: &str) -> String {
    patchsim_core::normalize_whitespace(text)
}

#[pyfunction]
fn syntactic_match(a: &str, b: &str) -> bool {
    patchsim_core::syntactic_match(a, b)
}

/// Lines `center - radius ..= center + radius` (1-based, clamped) of `source`.
#[pyfunction]
#[pyo3(signature = (source, center, radius = corpus::DEFAULT_RADIUS))]
fn extract_snippet(source: &str, center: usize, radius: usize) -> PyResult<String> {
    corpus::extract_snippet(source, center, radius, "-", VariantKind::Original)
        .map(|w| w.text)
        .map_err(py_err)
}

#[pyfunction]
fn cosine(u: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
    similarity::cosine(&u, &v).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (candidate, positives, negatives = Vec::new(), epsilon = COSMUL_EPSILON))]
fn cosmul(
    candidate: Vec<f64>,
    positives: Vec<Vec<f64>>,
    negatives: Vec<Vec<f64>>,
    epsilon: f64,
) -> PyResult<f64> {
    let pos: Vec<&[f64]> = positives.iter().map(Vec::as_slice).collect();
    let neg: Vec<&[f64]> = negatives.iter().map(Vec::as_slice).collect();
    similarity::cosmul(&candidate, &pos, &neg, epsilon).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (relevances, p = None))]
fn dcg(relevances: Vec<f64>, p: Option<usize>) -> PyResult<f64> {
    let p = p.unwrap_or(relevances.len());
    patchsim_core::dcg(&relevances, p).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (relevances, p = None))]
fn idcg(relevances: Vec<f64>, p: Option<usize>) -> PyResult<f64> {
    let p = p.unwrap_or(relevances.len());
    patchsim_core::idcg(&relevances, p).map_err(py_err)
}

/// nDCG of a ranked relevance list; 0 when the ideal DCG is not positive.
#[pyfunction]
#[pyo3(signature = (relevances, p = None))]
fn ndcg(relevances: Vec<f64>, p: Option<usize>) -> PyResult<f64> {
    let p = p.unwrap_or(relevances.len());
    patchsim_core::ndcg(&relevances, p)
        .map(|n| n.ndcg)
        .map_err(py_err)
}

/// Bug ids with their candidate and syntactic-match counts.
#[pyfunction]
#[pyo3(signature = (root, radius = corpus::DEFAULT_RADIUS))]
fn ingest<'py>(py: Python<'py>, root: PathBuf, radius: usize) -> PyResult<Bound<'py, PyDict>> {
    let manifest = patchsim_core::ingest_corpus(&root, radius).map_err(py_err)?;
    let bugs = PyDict::new(py);
    for bug in &manifest.bugs {
        let row = PyDict::new(py);
        row.set_item("candidates", bug.candidates.len())?;
        row.set_item("syntactic_matches", count_syntactic_matches(bug))?;
        row.set_item("faulty_line", bug.faulty_line)?;
        bugs.set_item(&bug.bug_id, row)?;
    }
    Ok(bugs)
}

/// Run every stage and return `{"exit_code", "failures", "notices"}`.
#[pyfunction]
#[pyo3(signature = (
    corpus, out, dim = 256, window = 5, min_count = 2, epochs = 50, negative = 5,
    radius = corpus::DEFAULT_RADIUS, seed = 42, metric = "cosmul", aux = None,
))]
#[allow(clippy::too_many_arguments)]
fn run_pipeline<'py>(
    py: Python<'py>,
    corpus: PathBuf,
    out: PathBuf,
    dim: usize,
    window: usize,
    min_count: usize,
    epochs: usize,
    negative: usize,
    radius: usize,
    seed: u64,
    metric: &str,
    aux: Option<PathBuf>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = RunConfig::new(corpus, out);
    cfg.embedding = EmbeddingConfig {
        dim,
        window,
        min_count,
        epochs,
        negative_samples: negative,
        seed,
        ..EmbeddingConfig::default()
    };
    cfg.radius = radius;
    cfg.metric = parse_metric(metric)?;
    cfg.aux = aux;
    let report = py
        .detach(|| patchsim_core::run_pipeline(&cfg))
        .map_err(py_err)?;
    let dict = PyDict::new(py);
    dict.set_item("exit_code", if report.is_clean() { 0 } else { 2 })?;
    let failures: Vec<(String, String)> = report
        .failures
        .iter()
        .map(|(bug, e)| (bug.clone(), e.to_string()))
        .collect();
    dict.set_item("failures", failures)?;
    dict.set_item("notices", report.notices)?;
    Ok(dict)
}

/// A trained paragraph-vector model.
#[pyclass(name = "Model", module = "patchsim")]
struct PyModel {
    inner: EmbeddingModel,
}

#[pymethods]
impl PyModel {
    /// Train on `(doc_id, text)` pairs; texts are tokenized first.
    #[staticmethod]
    #[pyo3(signature = (
        docs, dim = 256, window = 5, min_count = 2, epochs = 50, negative = 5,
        alpha_start = 0.025, alpha_end = 0.0001, seed = 42,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn train(
        py: Python<'_>,
        docs: Vec<(String, String)>,
        dim: usize,
        window: usize,
        min_count: usize,
        epochs: usize,
        negative: usize,
        alpha_start: f64,
        alpha_end: f64,
        seed: u64,
    ) -> PyResult<Self> {
        let corpus: Vec<TokenSequence> = docs
            .iter()
            .map(|(id, text)| TokenSequence::from_text(id, text))
            .collect();
        let cfg = EmbeddingConfig {
            dim,
            window,
            min_count,
            epochs,
            negative_samples: negative,
            alpha_start,
            alpha_end,
            seed,
            deterministic: true,
        };
        let inner = py
            .detach(|| patchsim_core::train(&corpus, &cfg))
            .map_err(py_err)?;
        Ok(PyModel { inner })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        EmbeddingModel::load(&path)
            .map(|inner| PyModel { inner })
            .map_err(py_err)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path).map_err(py_err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn doc_ids(&self) -> Vec<String> {
        self.inner.doc_ids().to_vec()
    }

    fn vocabulary(&self) -> Vec<(String, u64)> {
        self.inner
            .vocab
            .iter()
            .map(|(t, n)| (t.to_owned(), n))
            .collect()
    }

    fn doc_vector(&self, doc_id: &str) -> PyResult<Vec<f32>> {
        self.inner
            .doc_vector(doc_id)
            .map(<[f32]>::to_vec)
            .map_err(py_err)
    }

    /// Similarity of two documents under `metric` ("cosine" or "cosmul").
    #[pyo3(signature = (a, b, metric = "cosmul"))]
    fn similarity(&self, a: &str, b: &str, metric: &str) -> PyResult<f64> {
        let u = self.inner.doc_vector_f64(a).map_err(py_err)?;
        let v = self.inner.doc_vector_f64(b).map_err(py_err)?;
        similarity::score(parse_metric(metric)?, &u, &v)
            .map(|s| s.value)
            .map_err(py_err)
    }

    /// Rank `candidates` by similarity to `reference`, best first, as
    /// `(doc_id, score)` pairs. Ties keep the order given.
    #[pyo3(signature = (reference, candidates, metric = "cosmul"))]
    fn rank(
        &self,
        reference: &str,
        candidates: Vec<String>,
        metric: &str,
    ) -> PyResult<Vec<(String, f64)>> {
        let metric = parse_metric(metric)?;
        let r = self.inner.doc_vector_f64(reference).map_err(py_err)?;
        let mut scored = candidates
            .into_iter()
            .map(|id| {
                let v = self.inner.doc_vector_f64(&id).map_err(py_err)?;
                let s = similarity::score(metric, &v, &r).map_err(py_err)?;
                Ok((id, s.value))
            })
            .collect::<PyResult<Vec<_>>>()?;
        scored.sort_by(|a, b| b.1.total_cmp(&a.1));
        Ok(scored)
    }

    fn __len__(&self) -> usize {
        self.inner.doc_count()
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(dim={}, docs={}, vocab={})",
            self.inner.dim(),
            self.inner.doc_count(),
            self.inner.vocab.len()
        )
    }
}

#[pymodule]
fn patchsim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_whitespace, m)?)?;
    m.add_function(wrap_pyfunction!(syntactic_match, m)?)?;
    m.add_function(wrap_pyfunction!(extract_snippet, m)?)?;
    m.add_function(wrap_pyfunction!(cosine, m)?)?;
    m.add_function(wrap_pyfunction!(cosmul, m)?)?;
    m.add_function(wrap_pyfunction!(dcg, m)?)?;
    m.add_function(wrap_pyfunction!(idcg, m)?)?;
    m.add_function(wrap_pyfunction!(ndcg, m)?)?;
    m.add_function(wrap_pyfunction!(ingest, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    m.add_class::<PyModel>()?;
    Ok(())
}
