//! Bag-of-words encoding with document-frequency vocabulary pruning.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::textprep::TokenizedDoc;
use crate::topic::TopicError;

/// Id-encoded corpus. Vocabulary ids are assigned in lexicographic word
/// order, so encoding is deterministic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BowCorpus {
    pub vocab: Vec<String>,
    /// Word-id sequences, one per document; token order preserved.
    pub docs: Vec<Vec<usize>>,
    pub doc_ids: Vec<String>,
}

impl BowCorpus {
    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    pub fn total_tokens(&self) -> usize {
        self.docs.iter().map(|d| d.len()).sum()
    }
}

/// Encodes preprocessed documents, keeping words with
/// `min_df <= df <= max_df_fraction * D`. Out-of-vocabulary tokens are
/// dropped from the encoded documents.
pub fn build_bow(
    docs: &[TokenizedDoc],
    min_df: usize,
    max_df_fraction: f64,
) -> Result<BowCorpus, TopicError> {
    if docs.is_empty() {
        return Err(TopicError::EmptyVocabulary);
    }
    if min_df < 1 || !(0.0..=1.0).contains(&max_df_fraction) || max_df_fraction <= 0.0 {
        return Err(TopicError::InvalidConfig(format!(
            "min_df={min_df}, max_df_fraction={max_df_fraction}"
        )));
    }

    let mut df: HashMap<&str, usize> = HashMap::new();
    for doc in docs {
        let mut seen: Vec<&str> = doc.tokens.iter().map(|t| t.term()).collect();
        seen.sort_unstable();
        seen.dedup();
        for word in seen {
            *df.entry(word).or_insert(0) += 1;
        }
    }

    let max_df = max_df_fraction * docs.len() as f64;
    let mut vocab: Vec<String> = df
        .iter()
        .filter(|(_, &count)| count >= min_df && count as f64 <= max_df)
        .map(|(word, _)| word.to_string())
        .collect();
    vocab.sort_unstable();
    if vocab.is_empty() {
        return Err(TopicError::EmptyVocabulary);
    }

    let index: HashMap<&str, usize> =
        vocab.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
    let encoded: Vec<Vec<usize>> = docs
        .iter()
        .map(|doc| {
            doc.tokens
                .iter()
                .filter_map(|t| index.get(t.term()).copied())
                .collect()
        })
        .collect();

    Ok(BowCorpus {
        vocab,
        docs: encoded,
        doc_ids: docs.iter().map(|d| d.doc_id.clone()).collect(),
    })
}
