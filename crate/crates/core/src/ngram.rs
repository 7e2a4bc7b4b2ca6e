//! TF-IDF weighted n-gram rankings.
//!
//! The weighting is pinned: smooth idf `ln((1+N)/(1+df)) + 1`, per-document
//! L2 normalization, aggregate weight = sum of normalized per-document
//! weights. Ranking ties break lexicographically so outputs are stable.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textprep::TokenizedDoc;

#[derive(Debug, Error)]
pub enum NgramError {
    #[error("corpus contains no documents")]
    EmptyCorpus,
    #[error("n-gram order must be at least 1")]
    InvalidOrder,
}

/// Counts of all contiguous `n`-token windows; grams are space-joined
/// lemmas and never cross document boundaries.
pub fn extract_ngrams(doc: &TokenizedDoc, n: usize) -> HashMap<String, usize> {
    let mut counts = HashMap::new();
    if n == 0 || doc.tokens.len() < n {
        return counts;
    }
    let terms: Vec<&str> = doc.tokens.iter().map(|t| t.term()).collect();
    for window in terms.windows(n) {
        *counts.entry(window.join(" ")).or_insert(0) += 1;
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfRow {
    pub gram: String,
    pub weight: f64,
    pub df: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TfidfTable {
    pub n: usize,
    pub doc_count: usize,
    /// Sorted descending by weight, ties lexicographic on the gram.
    pub rows: Vec<TfidfRow>,
}

pub fn smooth_idf(doc_count: usize, df: usize) -> f64 {
    ((1.0 + doc_count as f64) / (1.0 + df as f64)).ln() + 1.0
}

/// Aggregate TF-IDF over the corpus for n-grams of order `n`.
pub fn tfidf(docs: &[TokenizedDoc], n: usize) -> Result<TfidfTable, NgramError> {
    if docs.is_empty() {
        return Err(NgramError::EmptyCorpus);
    }
    if n == 0 {
        return Err(NgramError::InvalidOrder);
    }
    let doc_count = docs.len();
    let per_doc: Vec<HashMap<String, usize>> = docs.iter().map(|d| extract_ngrams(d, n)).collect();

    let mut df: HashMap<&str, usize> = HashMap::new();
    for counts in &per_doc {
        for gram in counts.keys() {
            *df.entry(gram).or_insert(0) += 1;
        }
    }

    let mut aggregate: HashMap<&str, f64> = HashMap::new();
    for counts in &per_doc {
        if counts.is_empty() {
            continue;
        }
        let mut weights: Vec<(&str, f64)> = counts
            .iter()
            .map(|(gram, tf)| {
                let idf = smooth_idf(doc_count, df[gram.as_str()]);
                (gram.as_str(), *tf as f64 * idf)
            })
            .collect();
        // fixed summation order keeps the float results reproducible
        weights.sort_unstable_by(|a, b| a.0.cmp(b.0));
        let norm = weights.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        for (gram, w) in weights {
            *aggregate.entry(gram).or_insert(0.0) += w / norm;
        }
    }

    let mut rows: Vec<TfidfRow> = aggregate
        .into_iter()
        .map(|(gram, weight)| TfidfRow {
            df: df[gram],
            gram: gram.to_string(),
            weight,
        })
        .collect();
    rows.sort_by(|a, b| {
        b.weight
            .partial_cmp(&a.weight)
            .unwrap()
            .then_with(|| a.gram.cmp(&b.gram))
    });

    Ok(TfidfTable { n, doc_count, rows })
}

/// First `min(k, len)` rows of the table.
pub fn top_terms(table: &TfidfTable, k: usize) -> &[TfidfRow] {
    &table.rows[..k.min(table.rows.len())]
}
