//! Collapsed Gibbs sampling for LDA.
//!
//! Each sweep resamples every token's topic from
//! `p(z = k | rest) ∝ (n_dk + α) · (n_kw + β) / (n_k + Vβ)` with the
//! token's own counts removed first. phi and theta are estimated from the
//! final post-burn-in state, so identical inputs and seed give bit-identical
//! models.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::topic::{BowCorpus, TopicError};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LdaConfig {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl LdaConfig {
    /// Defaults with α = 50/K and β = 0.01.
    pub fn with_topics(k: usize) -> Self {
        Self {
            k,
            alpha: 50.0 / k.max(1) as f64,
            beta: 0.01,
            iterations: 500,
            burn_in: 100,
            seed: 42,
        }
    }

    pub fn validate(&self) -> Result<(), TopicError> {
        if self.k < 1 {
            return Err(TopicError::InvalidConfig("k must be >= 1".into()));
        }
        if self.alpha <= 0.0 || self.beta <= 0.0 {
            return Err(TopicError::InvalidConfig("alpha and beta must be > 0".into()));
        }
        if self.iterations <= self.burn_in {
            return Err(TopicError::InvalidConfig("iterations must exceed burn_in".into()));
        }
        Ok(())
    }
}

/// Fitted LDA state. Count matrices and assignments are retained so the
/// conservation invariants stay checkable after the fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopicModel {
    pub config: LdaConfig,
    /// Per-document, per-token topic assignments.
    pub z: Vec<Vec<usize>>,
    pub n_dk: Vec<Vec<usize>>,
    pub n_kw: Vec<Vec<usize>>,
    pub n_k: Vec<usize>,
    /// Topic-word distributions, K x V; rows sum to 1.
    pub phi: Vec<Vec<f64>>,
    /// Document-topic distributions, D x K; rows sum to 1.
    pub theta: Vec<Vec<f64>>,
}

pub fn fit_lda(bow: &BowCorpus, config: &LdaConfig) -> Result<TopicModel, TopicError> {
    config.validate()?;
    let k = config.k;
    let v = bow.vocab_size();
    let d = bow.doc_count();
    if v == 0 || d == 0 {
        return Err(TopicError::EmptyVocabulary);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut z: Vec<Vec<usize>> = Vec::with_capacity(d);
    let mut n_dk = vec![vec![0usize; k]; d];
    let mut n_kw = vec![vec![0usize; v]; k];
    let mut n_k = vec![0usize; k];

    for (doc_idx, doc) in bow.docs.iter().enumerate() {
        let mut assignments = Vec::with_capacity(doc.len());
        for &word in doc {
            let topic = rng.gen_range(0..k);
            assignments.push(topic);
            n_dk[doc_idx][topic] += 1;
            n_kw[topic][word] += 1;
            n_k[topic] += 1;
        }
        z.push(assignments);
    }

    let v_beta = v as f64 * config.beta;
    let mut probs = vec![0.0f64; k];
    for _ in 0..config.iterations {
        for (doc_idx, doc) in bow.docs.iter().enumerate() {
            for (token_idx, &word) in doc.iter().enumerate() {
                let old = z[doc_idx][token_idx];
                n_dk[doc_idx][old] -= 1;
                n_kw[old][word] -= 1;
                n_k[old] -= 1;

                let mut total = 0.0;
                for topic in 0..k {
                    let p = (n_dk[doc_idx][topic] as f64 + config.alpha)
                        * (n_kw[topic][word] as f64 + config.beta)
                        / (n_k[topic] as f64 + v_beta);
                    total += p;
                    probs[topic] = total;
                }
                let u: f64 = rng.gen::<f64>() * total;
                let new = probs.iter().position(|&cum| u < cum).unwrap_or(k - 1);

                z[doc_idx][token_idx] = new;
                n_dk[doc_idx][new] += 1;
                n_kw[new][word] += 1;
                n_k[new] += 1;
            }
        }
    }

    let phi: Vec<Vec<f64>> = (0..k)
        .map(|topic| {
            let denom = n_k[topic] as f64 + v_beta;
            (0..v)
                .map(|word| (n_kw[topic][word] as f64 + config.beta) / denom)
                .collect()
        })
        .collect();
    let theta: Vec<Vec<f64>> = (0..d)
        .map(|doc_idx| {
            let len = bow.docs[doc_idx].len() as f64;
            let denom = len + k as f64 * config.alpha;
            (0..k)
                .map(|topic| (n_dk[doc_idx][topic] as f64 + config.alpha) / denom)
                .collect()
        })
        .collect();

    Ok(TopicModel {
        config: config.clone(),
        z,
        n_dk,
        n_kw,
        n_k,
        phi,
        theta,
    })
}

impl TopicModel {
    /// Per-topic share of all assigned tokens.
    pub fn topic_marginals(&self) -> Vec<f64> {
        let total: usize = self.n_k.iter().sum();
        self.n_k.iter().map(|&n| n as f64 / total as f64).collect()
    }

    /// Checks the count conservation identities against the corpus.
    pub fn counts_consistent(&self, bow: &BowCorpus) -> bool {
        let doc_ok = self
            .n_dk
            .iter()
            .zip(&bow.docs)
            .all(|(row, doc)| row.iter().sum::<usize>() == doc.len());
        let topic_ok = self
            .n_kw
            .iter()
            .zip(&self.n_k)
            .all(|(row, &total)| row.iter().sum::<usize>() == total);
        let grand_ok = self.n_k.iter().sum::<usize>() == bow.total_tokens();
        doc_ok && topic_ok && grand_ok
    }
}
