//! Cosine and 3CosMul similarity over embedding vectors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const COSMUL_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Cosine,
    #[default]
    Cosmul,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Cosine => "cosine",
            Metric::Cosmul => "cosmul",
        })
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cosine" => Ok(Metric::Cosine),
            "cosmul" => Ok(Metric::Cosmul),
            other => Err(format!(
                "unknown metric `{other}` (expected cosine or cosmul)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityScore {
    pub value: f64,
    pub metric: Metric,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch(u.len(), v.len()));
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

fn shifted_cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    Ok((1.0 + cosine(u, v)?) / 2.0)
}

/// Multiplicative combination of shifted cosines:
/// `prod_p (1+cos(c,p))/2 / (prod_n (1+cos(c,n))/2 + epsilon)`.
///
/// Every factor lies in `[0, 1]`; an empty negative product is 1.
pub fn cosmul(
    candidate: &[f64],
    positives: &[&[f64]],
    negatives: &[&[f64]],
    epsilon: f64,
) -> Result<f64> {
    if positives.is_empty() {
        return Err(Error::NoPositives);
    }
    let mut num = 1.0;
    for p in positives {
        num *= shifted_cosine(candidate, p)?;
    }
    let mut den = 1.0;
    for n in negatives {
        den *= shifted_cosine(candidate, n)?;
    }
    Ok(num / (den + epsilon))
}

/// Score `candidate` against a single reference with the chosen metric.
pub fn score(metric: Metric, candidate: &[f64], reference: &[f64]) -> Result<SimilarityScore> {
    let value = match metric {
        Metric::Cosine => cosine(candidate, reference)?,
        Metric::Cosmul => cosmul(candidate, &[reference], &[], COSMUL_EPSILON)?,
    };
    Ok(SimilarityScore { value, metric })
}
