use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::objective::PvdmExample;
use super::vocab::Vocabulary;
use super::EmbeddingModel;
use crate::error::{Error, Result};
use crate::tokenizer::TokenSequence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub dim: usize,
    pub window: usize,
    pub min_count: usize,
    pub epochs: usize,
    pub negative_samples: usize,
    pub alpha_start: f64,
    pub alpha_end: f64,
    pub seed: u64,
    /// Single-threaded, bit-reproducible training. When false, documents
    /// are sharded across threads with unsynchronised updates.
    pub deterministic: bool,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            dim: 256,
            window: 5,
            min_count: 2,
            epochs: 50,
            negative_samples: 5,
            alpha_start: 0.025,
            alpha_end: 0.0001,
            seed: 42,
            deterministic: true,
        }
    }
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidConfig(m.to_owned()));
        if self.dim == 0 {
            return fail("dim must be at least 1");
        }
        if self.window == 0 {
            return fail("window must be at least 1");
        }
        if self.epochs == 0 {
            return fail("epochs must be at least 1");
        }
        if !(self.alpha_end > 0.0 && self.alpha_end <= self.alpha_start) {
            return fail("learning rates must satisfy 0 < alpha_end <= alpha_start");
        }
        Ok(())
    }
}

/// Row-major f64 matrix with relaxed-atomic cells.
///
/// Single-threaded use behaves exactly like a plain `Vec<f64>`; concurrent
/// use gives lock-free hogwild updates without `unsafe`.
struct SharedMatrix {
    dim: usize,
    cells: Vec<AtomicU64>,
}

impl SharedMatrix {
    fn uniform(rows: usize, dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let half = 0.5 / dim as f64;
        let cells = (0..rows * dim)
            .map(|_| AtomicU64::new(rng.gen_range(-half..half).to_bits()))
            .collect();
        SharedMatrix { dim, cells }
    }

    fn read_row(&self, row: usize, out: &mut [f64]) {
        let base = row * self.dim;
        for (o, c) in out.iter_mut().zip(&self.cells[base..base + self.dim]) {
            *o = f64::from_bits(c.load(Ordering::Relaxed));
        }
    }

    fn add_row(&self, row: usize, delta: &[f64], scale: f64) {
        let base = row * self.dim;
        for (c, d) in self.cells[base..base + self.dim].iter().zip(delta) {
            let v = f64::from_bits(c.load(Ordering::Relaxed)) + scale * d;
            c.store(v.to_bits(), Ordering::Relaxed);
        }
    }

    fn first_non_finite_row(&self) -> Option<usize> {
        self.cells
            .iter()
            .position(|c| !f64::from_bits(c.load(Ordering::Relaxed)).is_finite())
            .map(|i| i / self.dim)
    }

    fn to_f32(&self) -> Vec<f32> {
        self.cells
            .iter()
            .map(|c| f64::from_bits(c.load(Ordering::Relaxed)) as f32)
            .collect()
    }
}

struct Trainer<'a> {
    config: &'a EmbeddingConfig,
    vocab: &'a Vocabulary,
    /// In-vocabulary index per token position, `None` for filtered tokens.
    docs: Vec<Vec<Option<usize>>>,
    doc_ids: Vec<String>,
    words: SharedMatrix,
    outputs: SharedMatrix,
    doc_vecs: SharedMatrix,
    processed: AtomicUsize,
    total: usize,
}

impl Trainer<'_> {
    fn alpha(&self) -> f64 {
        let done = self.processed.load(Ordering::Relaxed) as f64;
        let progress = (done / self.total as f64).min(1.0);
        self.config.alpha_start - (self.config.alpha_start - self.config.alpha_end) * progress
    }

    fn train_doc(&self, d: usize, rng: &mut ChaCha8Rng, epoch: usize) -> Result<()> {
        let dim = self.config.dim;
        let tokens = &self.docs[d];
        let mut doc_buf = vec![0.0; dim];
        let mut target_buf = vec![0.0; dim];
        let mut ctx_bufs: Vec<Vec<f64>> = Vec::new();
        let mut noise_bufs: Vec<Vec<f64>> = Vec::new();

        for (pos, &center) in tokens.iter().enumerate() {
            let Some(target) = center else { continue };

            let lo = pos.saturating_sub(self.config.window);
            let hi = (pos + self.config.window).min(tokens.len() - 1);
            let context: Vec<usize> = (lo..=hi)
                .filter(|&j| j != pos)
                .filter_map(|j| tokens[j])
                .collect();
            let noise: Vec<usize> = (0..self.config.negative_samples)
                .map(|_| self.vocab.sample_noise(rng.gen::<f64>()))
                .filter(|&w| w != target)
                .collect();

            self.doc_vecs.read_row(d, &mut doc_buf);
            self.outputs.read_row(target, &mut target_buf);
            ctx_bufs.resize_with(context.len(), || vec![0.0; dim]);
            for (buf, &w) in ctx_bufs.iter_mut().zip(&context) {
                self.words.read_row(w, buf);
            }
            noise_bufs.resize_with(noise.len(), || vec![0.0; dim]);
            for (buf, &w) in noise_bufs.iter_mut().zip(&noise) {
                self.outputs.read_row(w, buf);
            }

            let example = PvdmExample {
                doc: &doc_buf,
                contexts: ctx_bufs.iter().map(Vec::as_slice).collect(),
                target: &target_buf,
                noise: noise_bufs.iter().map(Vec::as_slice).collect(),
            };
            let grad = example.gradient();
            if grad.doc.iter().any(|g| !g.is_finite()) {
                return Err(Error::NonFinite {
                    epoch,
                    doc_id: self.doc_ids[d].clone(),
                });
            }

            let step = -self.alpha();
            self.outputs.add_row(target, &grad.target, step);
            for (&w, g) in noise.iter().zip(&grad.noise) {
                self.outputs.add_row(w, g, step);
            }
            self.doc_vecs.add_row(d, &grad.doc, step);
            for &w in &context {
                self.words.add_row(w, &grad.context, step);
            }
            self.processed.fetch_add(1, Ordering::Relaxed);
        }
        Ok(())
    }

    fn check_finite(&self, epoch: usize) -> Result<()> {
        let located = [
            (&self.doc_vecs, None),
            (&self.words, Some("word vectors")),
            (&self.outputs, Some("output weights")),
        ]
        .into_iter()
        .find_map(|(m, what)| {
            m.first_non_finite_row().map(|row| match what {
                None => self.doc_ids[row].clone(),
                Some(w) => format!("{w} row {row}"),
            })
        });
        match located {
            Some(doc_id) => Err(Error::NonFinite { epoch, doc_id }),
            None => Ok(()),
        }
    }
}

/// Train a PV-DM model over `corpus`.
///
/// With `deterministic` set, the result depends only on the corpus order and
/// the config. Word, output and document matrices are initialised in that
/// order from one ChaCha8 stream seeded with `config.seed`; the same stream
/// then drives negative sampling.
pub fn train(corpus: &[TokenSequence], config: &EmbeddingConfig) -> Result<EmbeddingModel> {
    config.validate()?;
    let vocab = Vocabulary::build(corpus, config.min_count)?;

    let mut doc_index = HashMap::with_capacity(corpus.len());
    for (i, doc) in corpus.iter().enumerate() {
        if doc_index.insert(doc.doc_id.clone(), i).is_some() {
            return Err(Error::DuplicateDocument(doc.doc_id.clone()));
        }
    }

    let docs: Vec<Vec<Option<usize>>> = corpus
        .iter()
        .map(|d| d.tokens.iter().map(|t| vocab.index_of(t)).collect())
        .collect();
    let centers: usize = docs.iter().map(|d| d.iter().flatten().count()).sum();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let words = SharedMatrix::uniform(vocab.len(), config.dim, &mut rng);
    let outputs = SharedMatrix::uniform(vocab.len(), config.dim, &mut rng);
    let doc_vecs = SharedMatrix::uniform(corpus.len(), config.dim, &mut rng);

    let trainer = Trainer {
        config,
        vocab: &vocab,
        docs,
        doc_ids: corpus.iter().map(|d| d.doc_id.clone()).collect(),
        words,
        outputs,
        doc_vecs,
        processed: AtomicUsize::new(0),
        total: (centers * config.epochs).max(1),
    };

    for epoch in 0..config.epochs {
        if config.deterministic {
            for d in 0..corpus.len() {
                trainer.train_doc(d, &mut rng, epoch)?;
            }
        } else {
            let base: u64 = rng.gen();
            (0..corpus.len()).into_par_iter().try_for_each(|d| {
                let mut local = ChaCha8Rng::seed_from_u64(base ^ d as u64);
                trainer.train_doc(d, &mut local, epoch)
            })?;
        }
        trainer.check_finite(epoch)?;
    }

    Ok(EmbeddingModel {
        config: config.clone(),
        word_vectors: trainer.words.to_f32(),
        context_weights: trainer.outputs.to_f32(),
        doc_vectors: trainer.doc_vecs.to_f32(),
        doc_ids: trainer.doc_ids,
        doc_index,
        vocab,
    })
}
