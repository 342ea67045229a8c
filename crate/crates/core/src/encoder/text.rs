//! Hashed n-gram text features: word unigrams and bigrams plus character
//! trigrams of each word, lowercased with punctuation stripped, weighted by
//! term frequency.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::seeds::fnv1a64;

pub const DEFAULT_TEXT_BUCKETS: usize = 4096;

/// Sparse `(index, value)` pairs sorted by index.
pub type SparseVec = Vec<(u32, f64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextFeatures {
    pub buckets: usize,
    /// Raw term frequencies per bucket.
    pub weights: BTreeMap<u32, f64>,
}

pub fn tokenize(text: &str) -> Vec<String> {
    let cleaned: String =
        text.chars().map(|c| if c.is_alphanumeric() { c.to_ascii_lowercase() } else { ' ' }).collect();
    cleaned.split_whitespace().map(|w| w.to_lowercase()).collect()
}

/// The hashed terms a text contributes, before bucketing. Exposed so tests
/// can locate the buckets of a specific n-gram.
pub fn terms(text: &str) -> Vec<String> {
    let toks = tokenize(text);
    let mut out = Vec::with_capacity(toks.len() * 8);
    for t in &toks {
        out.push(format!("w:{t}"));
    }
    for pair in toks.windows(2) {
        out.push(format!("b:{} {}", pair[0], pair[1]));
    }
    for t in &toks {
        out.extend(char_trigrams(t).into_iter().map(|g| format!("c:{g}")));
    }
    out
}

pub fn char_trigrams(word: &str) -> Vec<String> {
    let padded: Vec<char> = std::iter::once('#').chain(word.chars()).chain(std::iter::once('#')).collect();
    padded.windows(3).map(|w| w.iter().collect()).collect()
}

pub fn bucket_of(term: &str, buckets: usize) -> u32 {
    (fnv1a64(term.as_bytes()) % buckets as u64) as u32
}

impl TextFeatures {
    pub fn extract(text: &str, buckets: usize) -> Self {
        let mut weights = BTreeMap::new();
        for term in terms(text) {
            *weights.entry(bucket_of(&term, buckets)).or_insert(0.0) += 1.0;
        }
        TextFeatures { buckets, weights }
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// L2-normalized sparse form; empty for empty text.
    pub fn normalized(&self) -> SparseVec {
        let norm = self.weights.values().map(|w| w * w).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Vec::new();
        }
        self.weights.iter().map(|(&i, &w)| (i, w / norm)).collect()
    }

    /// Dense L2-normalized vector of length `buckets`; zeros for empty text.
    pub fn densify(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.buckets];
        for (i, w) in self.normalized() {
            out[i as usize] = w;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenization_strips_punctuation() {
        assert_eq!(tokenize("Revenue, by MONTH (2020)!"), vec!["revenue", "by", "month", "2020"]);
    }

    #[test]
    fn trigrams_have_boundaries() {
        assert_eq!(char_trigrams("ab"), vec!["#ab", "ab#"]);
        assert_eq!(char_trigrams("rev").len(), 3);
    }

    #[test]
    fn normalized_and_in_range() {
        let f = TextFeatures::extract("hotel booking distribution by month", 4096);
        assert!(f.weights.keys().all(|&k| (k as usize) < 4096));
        let n: f64 = f.densify().iter().map(|v| v * v).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_text_is_zero() {
        let f = TextFeatures::extract("  ,,, ", 64);
        assert!(f.is_empty());
        assert!(f.densify().iter().all(|v| *v == 0.0));
    }
}
