//! Paragraph-vector (PV-DM) document embeddings trained from scratch.

pub mod objective;
mod train;
mod vocab;

use std::collections::HashMap;
use std::fs;
use std::path::Path;

pub use train::{train, EmbeddingConfig};
pub use vocab::Vocabulary;

use crate::error::{Error, Result};

/// A trained model. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub config: EmbeddingConfig,
    pub vocab: Vocabulary,
    /// `vocab.len() x dim`, row-major.
    pub word_vectors: Vec<f32>,
    /// Output layer used by negative sampling, `vocab.len() x dim`.
    pub context_weights: Vec<f32>,
    /// `doc_count() x dim`, row-major.
    pub doc_vectors: Vec<f32>,
    doc_ids: Vec<String>,
    doc_index: HashMap<String, usize>,
}

impl EmbeddingModel {
    /// Assemble a model from explicit matrices, checking shapes and ids.
    pub fn from_parts(
        config: EmbeddingConfig,
        vocab: Vocabulary,
        word_vectors: Vec<f32>,
        context_weights: Vec<f32>,
        doc_ids: Vec<String>,
        doc_vectors: Vec<f32>,
    ) -> Result<Self> {
        config.validate()?;
        let dim = config.dim;
        if word_vectors.len() != vocab.len() * dim
            || context_weights.len() != vocab.len() * dim
            || doc_vectors.len() != doc_ids.len() * dim
        {
            return Err(Error::InvalidConfig(
                "matrix shapes do not match dim".into(),
            ));
        }
        let mut doc_index = HashMap::with_capacity(doc_ids.len());
        for (row, id) in doc_ids.iter().enumerate() {
            if doc_index.insert(id.clone(), row).is_some() {
                return Err(Error::DuplicateDocument(id.clone()));
            }
        }
        Ok(EmbeddingModel {
            config,
            vocab,
            word_vectors,
            context_weights,
            doc_vectors,
            doc_ids,
            doc_index,
        })
    }

    pub fn dim(&self) -> usize {
        self.config.dim
    }

    pub fn doc_count(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn contains_doc(&self, doc_id: &str) -> bool {
        self.doc_index.contains_key(doc_id)
    }

    pub fn doc_vector(&self, doc_id: &str) -> Result<&[f32]> {
        let row = *self
            .doc_index
            .get(doc_id)
            .ok_or_else(|| Error::UnknownDocument(doc_id.to_owned()))?;
        let dim = self.dim();
        Ok(&self.doc_vectors[row * dim..(row + 1) * dim])
    }

    /// The document row widened to f64 for similarity computations.
    pub fn doc_vector_f64(&self, doc_id: &str) -> Result<Vec<f64>> {
        Ok(self
            .doc_vector(doc_id)?
            .iter()
            .map(|&x| f64::from(x))
            .collect())
    }

    pub fn word_vector(&self, token: &str) -> Option<&[f32]> {
        let row = self.vocab.index_of(token)?;
        let dim = self.dim();
        Some(&self.word_vectors[row * dim..(row + 1) * dim])
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let c = &self.config;
        let mut w =
            Vec::with_capacity(64 + 4 * (self.word_vectors.len() * 2 + self.doc_vectors.len()));
        w.extend_from_slice(MAGIC);
        put_u32(&mut w, VERSION);

        for v in [c.dim, c.window, c.min_count, c.epochs, c.negative_samples] {
            put_u32(&mut w, v as u32);
        }
        w.extend_from_slice(&c.alpha_start.to_le_bytes());
        w.extend_from_slice(&c.alpha_end.to_le_bytes());
        w.extend_from_slice(&c.seed.to_le_bytes());
        w.push(u8::from(c.deterministic));

        put_u32(&mut w, self.vocab.len() as u32);
        for (token, count) in self.vocab.iter() {
            put_str(&mut w, token);
            w.extend_from_slice(&count.to_le_bytes());
        }
        put_u32(&mut w, self.doc_ids.len() as u32);
        for id in &self.doc_ids {
            put_str(&mut w, id);
        }
        for m in [&self.word_vectors, &self.context_weights, &self.doc_vectors] {
            for x in m.iter() {
                w.extend_from_slice(&x.to_le_bytes());
            }
        }
        w
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::ModelFormat("bad magic bytes".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::UnsupportedVersion {
                found: version,
                expected: VERSION,
            });
        }

        let config = EmbeddingConfig {
            dim: r.u32()? as usize,
            window: r.u32()? as usize,
            min_count: r.u32()? as usize,
            epochs: r.u32()? as usize,
            negative_samples: r.u32()? as usize,
            alpha_start: r.f64()?,
            alpha_end: r.f64()?,
            seed: r.u64()?,
            deterministic: match r.take(1)?[0] {
                0 => false,
                1 => true,
                b => return Err(Error::ModelFormat(format!("bad flag byte {b}"))),
            },
        };
        config
            .validate()
            .map_err(|e| Error::ModelFormat(e.to_string()))?;

        let vocab_len = r.u32()? as usize;
        let mut entries = Vec::with_capacity(vocab_len.min(1 << 20));
        for _ in 0..vocab_len {
            let token = r.string()?;
            entries.push((token, r.u64()?));
        }
        if entries.is_empty() {
            return Err(Error::ModelFormat("empty vocabulary".into()));
        }
        let vocab = Vocabulary::from_counts(entries)?;

        let doc_count = r.u32()? as usize;
        let mut doc_ids = Vec::with_capacity(doc_count.min(1 << 20));
        let mut doc_index = HashMap::with_capacity(doc_count.min(1 << 20));
        for row in 0..doc_count {
            let id = r.string()?;
            if doc_index.insert(id.clone(), row).is_some() {
                return Err(Error::ModelFormat(format!("duplicate document id `{id}`")));
            }
            doc_ids.push(id);
        }

        let word_vectors = r.f32s(vocab.len() * config.dim)?;
        let context_weights = r.f32s(vocab.len() * config.dim)?;
        let doc_vectors = r.f32s(doc_count * config.dim)?;
        if r.pos != bytes.len() {
            return Err(Error::ModelFormat(format!(
                "{} trailing bytes",
                bytes.len() - r.pos
            )));
        }
        if [&word_vectors, &context_weights, &doc_vectors]
            .iter()
            .any(|m| m.iter().any(|x| !x.is_finite()))
        {
            return Err(Error::ModelFormat("non-finite matrix entry".into()));
        }

        Ok(EmbeddingModel {
            config,
            vocab,
            word_vectors,
            context_weights,
            doc_vectors,
            doc_ids,
            doc_index,
        })
    }
}

const MAGIC: &[u8; 4] = b"PVDM";
pub const VERSION: u32 = 1;

fn put_u32(w: &mut Vec<u8>, v: u32) {
    w.extend_from_slice(&v.to_le_bytes());
}

fn put_str(w: &mut Vec<u8>, s: &str) {
    put_u32(w, s.len() as u32);
    w.extend_from_slice(s.as_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::ModelFormat(format!("truncated at byte {}", self.pos)))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.array()?))
    }

    fn string(&mut self) -> Result<String> {
        let len = self.u32()? as usize;
        String::from_utf8(self.take(len)?.to_vec())
            .map_err(|_| Error::ModelFormat("invalid UTF-8 in string".into()))
    }

    fn f32s(&mut self, n: usize) -> Result<Vec<f32>> {
        let raw = self.take(
            n.checked_mul(4)
                .ok_or_else(|| Error::ModelFormat("matrix size overflow".into()))?,
        )?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("chunk of 4")))
            .collect())
    }
}
