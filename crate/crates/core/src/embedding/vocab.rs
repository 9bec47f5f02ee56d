use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::tokenizer::TokenSequence;

const NOISE_POWER: f64 = 0.75;

/// Retained tokens with their corpus frequencies and the unigram^0.75
/// noise distribution used for negative sampling.
///
/// Indices are dense and ordered by descending frequency, ties broken by
/// the token text, so a given corpus always yields the same layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
    total: u64,
    noise_cdf: Vec<f64>,
}

impl Vocabulary {
    pub fn build(corpus: &[TokenSequence], min_count: usize) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut freq: BTreeMap<&str, u64> = BTreeMap::new();
        for doc in corpus {
            for t in &doc.tokens {
                *freq.entry(t.as_str()).or_default() += 1;
            }
        }
        let retained: Vec<(String, u64)> = freq
            .into_iter()
            .filter(|&(_, n)| n >= min_count as u64)
            .map(|(t, n)| (t.to_owned(), n))
            .collect();
        if retained.is_empty() {
            return Err(Error::EmptyVocabulary { min_count });
        }
        Self::from_counts(retained)
    }

    /// Rebuild from (token, frequency) pairs, e.g. when loading a model.
    pub fn from_counts(mut entries: Vec<(String, u64)>) -> Result<Self> {
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let mut index = HashMap::with_capacity(entries.len());
        for (i, (t, _)) in entries.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::ModelFormat(format!(
                    "duplicate vocabulary token `{t}`"
                )));
            }
        }
        let (tokens, counts): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        let total = counts.iter().sum();

        let weights: Vec<f64> = counts
            .iter()
            .map(|&n| (n as f64).powf(NOISE_POWER))
            .collect();
        let norm: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let mut noise_cdf: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w / norm;
                acc
            })
            .collect();
        if let Some(last) = noise_cdf.last_mut() {
            *last = 1.0;
        }

        Ok(Vocabulary {
            tokens,
            counts,
            index,
            total,
            noise_cdf,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, idx: usize) -> &str {
        &self.tokens[idx]
    }

    pub fn count(&self, idx: usize) -> u64 {
        self.counts[idx]
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// Total frequency of retained tokens.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.tokens
            .iter()
            .map(String::as_str)
            .zip(self.counts.iter().copied())
    }

    pub fn noise_probability(&self, idx: usize) -> f64 {
        let prev = if idx == 0 {
            0.0
        } else {
            self.noise_cdf[idx - 1]
        };
        self.noise_cdf[idx] - prev
    }

    /// Map a uniform draw in `[0, 1)` to a noise token index.
    pub fn sample_noise(&self, u: f64) -> usize {
        self.noise_cdf
            .partition_point(|&c| c <= u)
            .min(self.tokens.len() - 1)
    }
}
