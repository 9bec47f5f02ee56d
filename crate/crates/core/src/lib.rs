//! Rank plausible program-repair patches by how similar their code snippets
//! are to the original program, using paragraph-vector embeddings trained
//! from scratch, and score the rankings against human relevance annotations
//! with nDCG.

pub mod corpus;
pub mod embedding;
pub mod error;
pub mod evaluation;
pub mod pipeline;
pub mod ranking;
pub mod report;
pub mod similarity;
pub mod tokenizer;

pub use corpus::{
    extract_snippet, ingest_corpus, locate_patched_line, BugCase, Candidate, CorpusManifest,
    SnippetWindow, VariantKind,
};
pub use embedding::{train, EmbeddingConfig, EmbeddingModel, Vocabulary};
pub use error::{Error, Result};
pub use evaluation::{
    dcg, evaluate_bug, idcg, merge_annotations, ndcg, syntactic_match, AnnotationSet, EvalFlag,
    EvalResult, RelevanceScore,
};
pub use pipeline::{run_pipeline, RunConfig, RunReport};
pub use ranking::{rank_all, rank_bug, RankedEntry, RankedList};
pub use similarity::{cosine, cosmul, Metric};
pub use tokenizer::{normalize_whitespace, tokenize, TokenSequence};
