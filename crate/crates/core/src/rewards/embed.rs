use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::hash::fnv1a64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbedError {
    /// The embedding provider cannot be reached or refused the request.
    Unavailable(String),
}

impl fmt::Display for EmbedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmbedError::Unavailable(reason) => write!(f, "embedder unavailable: {reason}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EmbedError {}

/// Text-embedding provider. Implementations must return vectors of one fixed
/// length with Euclidean norm 1 (within 1e-6), must be deterministic per
/// text, and must tolerate concurrent calls.
pub trait Embedder {
    fn embed(&self, text: &str) -> Result<Vec<f64>, EmbedError>;
}

/// Cosine similarity. Bitwise-identical vectors score exactly 1.0; the
/// general case divides the dot product by both norms.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> f64 {
    if a == b {
        return 1.0;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let norm_a = libm::sqrt(a.iter().map(|x| x * x).sum());
    let norm_b = libm::sqrt(b.iter().map(|x| x * x).sum());
    if norm_a == 0.0 || norm_b == 0.0 {
        return 0.0;
    }
    dot / (norm_a * norm_b)
}

/// Built-in deterministic embedder ("hash64" provider): each lowercased
/// alphanumeric token is hashed onto one of 64 dimensions with a
/// hash-derived sign, and the accumulated vector is L2-normalized. No model
/// weights, no IO; meant for tests and offline scoring, not semantic
/// fidelity.
#[derive(Debug, Clone, Copy, Default)]
pub struct HashEmbedder;

impl HashEmbedder {
    pub const DIMENSIONS: usize = 64;
}

impl Embedder for HashEmbedder {
    fn embed(&self, text: &str) -> Result<Vec<f64>, EmbedError> {
        let mut acc = vec![0.0f64; Self::DIMENSIONS];
        for token in text
            .split(|c: char| !c.is_ascii_alphanumeric())
            .filter(|t| !t.is_empty())
        {
            let h = fnv1a64(&token.to_lowercase());
            let dim = (h % Self::DIMENSIONS as u64) as usize;
            let sign = if (h >> 32) & 1 == 0 { 1.0 } else { -1.0 };
            acc[dim] += sign;
        }
        let norm = libm::sqrt(acc.iter().map(|x| x * x).sum());
        if norm == 0.0 {
            // Empty or punctuation-only text: a fixed unit vector keeps the
            // contract total.
            acc[0] = 1.0;
            return Ok(acc);
        }
        for x in &mut acc {
            *x /= norm;
        }
        Ok(acc)
    }
}
