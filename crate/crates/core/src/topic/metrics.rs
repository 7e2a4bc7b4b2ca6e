//! Model evaluation: per-word log likelihood, UMass coherence, topic
//! summaries, saliency, and the topic-count sweep.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::topic::{fit_lda, BowCorpus, LdaConfig, TopicError, TopicModel};

/// Held-in per-word log likelihood (natural log):
/// `(1/N) Σ_{d,i} ln Σ_k θ[d][k] φ[k][w]`. More negative means worse fit.
pub fn log_perplexity(model: &TopicModel, bow: &BowCorpus) -> f64 {
    let mut total = 0.0;
    let mut tokens = 0usize;
    for (doc_idx, doc) in bow.docs.iter().enumerate() {
        for &word in doc {
            let p: f64 = (0..model.config.k)
                .map(|k| model.theta[doc_idx][k] * model.phi[k][word])
                .sum();
            total += p.ln();
            tokens += 1;
        }
    }
    total / tokens as f64
}

/// The `top_n` words of topic `k` by phi, ties broken lexicographically.
pub fn top_words(model: &TopicModel, topic: usize, top_n: usize, bow: &BowCorpus) -> Vec<(String, f64)> {
    let mut indexed: Vec<(usize, f64)> = model.phi[topic]
        .iter()
        .copied()
        .enumerate()
        .collect();
    indexed.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap()
            .then_with(|| bow.vocab[a.0].cmp(&bow.vocab[b.0]))
    });
    indexed
        .into_iter()
        .take(top_n)
        .map(|(w, p)| (bow.vocab[w].clone(), p))
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoherenceScore {
    pub per_topic: Vec<f64>,
    pub mean: f64,
}

/// UMass coherence over each topic's `top_n` words:
/// `C = Σ_{i=2..n} Σ_{j<i} ln((D(w_i, w_j) + 1) / D(w_j))`
/// with document (co-)occurrence counts from the bag-of-words corpus.
pub fn umass_coherence(
    model: &TopicModel,
    bow: &BowCorpus,
    top_n: usize,
) -> Result<CoherenceScore, TopicError> {
    let doc_sets: Vec<HashSet<usize>> = bow
        .docs
        .iter()
        .map(|doc| doc.iter().copied().collect())
        .collect();
    let occurs = |w: usize| doc_sets.iter().filter(|s| s.contains(&w)).count();
    let co_occurs =
        |a: usize, b: usize| doc_sets.iter().filter(|s| s.contains(&a) && s.contains(&b)).count();

    let word_index: std::collections::HashMap<&str, usize> = bow
        .vocab
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_str(), i))
        .collect();

    let mut per_topic = Vec::with_capacity(model.config.k);
    for topic in 0..model.config.k {
        let words = top_words(model, topic, top_n, bow);
        let ids: Vec<usize> = words.iter().map(|(w, _)| word_index[w.as_str()]).collect();
        let mut score = 0.0;
        for i in 1..ids.len() {
            for j in 0..i {
                let d_j = occurs(ids[j]);
                if d_j == 0 {
                    return Err(TopicError::DegenerateTopic(bow.vocab[ids[j]].clone()));
                }
                let d_ij = co_occurs(ids[i], ids[j]);
                score += ((d_ij as f64 + 1.0) / d_j as f64).ln();
            }
        }
        per_topic.push(score);
    }

    let mean = per_topic.iter().sum::<f64>() / per_topic.len() as f64;
    Ok(CoherenceScore { per_topic, mean })
}

/// Word saliency: `p(w) · Σ_k p(k|w) ln(p(k|w) / p(k))` with
/// `p(k|w) ∝ φ[k][w] · p(k)`. Returns the `top_m` words by descending
/// saliency, ties lexicographic.
pub fn saliency_ranking(model: &TopicModel, bow: &BowCorpus, top_m: usize) -> Vec<(String, f64)> {
    let total = bow.total_tokens() as f64;
    let mut word_counts = vec![0usize; bow.vocab_size()];
    for doc in &bow.docs {
        for &word in doc {
            word_counts[word] += 1;
        }
    }
    let p_k = model.topic_marginals();

    let mut scored: Vec<(String, f64)> = (0..bow.vocab_size())
        .map(|w| {
            let p_w = word_counts[w] as f64 / total;
            let joint: Vec<f64> = (0..model.config.k).map(|k| model.phi[k][w] * p_k[k]).collect();
            let z: f64 = joint.iter().sum();
            let distinctiveness: f64 = joint
                .iter()
                .zip(&p_k)
                .map(|(&j, &pk)| {
                    let p_kw = j / z;
                    if p_kw > 0.0 {
                        p_kw * (p_kw / pk).ln()
                    } else {
                        0.0
                    }
                })
                .sum();
            (bow.vocab[w].clone(), p_w * distinctiveness)
        })
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    scored.truncate(top_m);
    scored
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalRow {
    pub k: usize,
    pub coherence: f64,
    pub log_perplexity: f64,
    /// Conventional perplexity, `exp(-log_perplexity)`.
    pub perplexity: f64,
}

/// Fits one model per topic count (seed = base seed + K, fits run in
/// parallel) and evaluates coherence and log perplexity for each.
pub fn sweep(
    bow: &BowCorpus,
    k_list: &[usize],
    base_config: &LdaConfig,
    coherence_top_n: usize,
) -> Result<Vec<EvalRow>, TopicError> {
    if k_list.is_empty() {
        return Err(TopicError::InvalidConfig("empty K list".into()));
    }
    k_list
        .par_iter()
        .map(|&k| {
            let config = LdaConfig {
                k,
                alpha: 50.0 / k as f64,
                seed: base_config.seed + k as u64,
                ..base_config.clone()
            };
            let model = fit_lda(bow, &config)?;
            let coherence = umass_coherence(&model, bow, coherence_top_n)?;
            let lp = log_perplexity(&model, bow);
            Ok(EvalRow {
                k,
                coherence: coherence.mean,
                log_perplexity: lp,
                perplexity: (-lp).exp(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textprep::{PipelineMode, PosTag, Token};
    use crate::topic::build_bow;
    use crate::TokenizedDoc;

    fn doc(id: &str, words: &[&str]) -> TokenizedDoc {
        TokenizedDoc {
            doc_id: id.into(),
            tokens: words
                .iter()
                .map(|w| Token {
                    surface: w.to_string(),
                    lemma: w.to_string(),
                    pos: PosTag::Untagged,
                })
                .collect(),
            stage_counts: vec![],
            mode: PipelineMode::Basic,
        }
    }

    fn config(k: usize) -> LdaConfig {
        LdaConfig {
            k,
            alpha: 0.5,
            beta: 0.01,
            iterations: 40,
            burn_in: 10,
            seed: 11,
        }
    }

    #[test]
    fn single_word_single_topic_log_perplexity() {
        let bow = build_bow(&[doc("a", &["fever"])], 1, 1.0).unwrap();
        let model = fit_lda(&bow, &config(1)).unwrap();
        let expected = model.phi[0][0].ln(); // theta[0][0] == 1
        assert!((log_perplexity(&model, &bow) - expected).abs() < 1e-12);
    }

    #[test]
    fn log_perplexity_matches_brute_force() {
        let bow = build_bow(
            &[
                doc("a", &["fever", "cough", "fever"]),
                doc("b", &["mask", "cough"]),
                doc("c", &["mask", "fever", "mask"]),
            ],
            1,
            1.0,
        )
        .unwrap();
        let model = fit_lda(&bow, &config(2)).unwrap();

        // independent double-sum recomputation
        let mut total = 0.0;
        let mut n = 0;
        for (d, docw) in bow.docs.iter().enumerate() {
            for &w in docw {
                let mut p = 0.0;
                for k in 0..2 {
                    p += model.theta[d][k] * model.phi[k][w];
                }
                total += p.ln();
                n += 1;
            }
        }
        assert!((log_perplexity(&model, &bow) - total / n as f64).abs() < 1e-12);
    }

    #[test]
    fn umass_pair_term_identities() {
        // always co-occurring: D(wi,wj) = D(wj) = 5 -> ln(6/5)
        assert!((((5.0f64 + 1.0) / 5.0).ln() - 0.182_321_556_793_955).abs() < 1e-9);
        // never co-occurring: ln(1/5)
        assert!(((1.0f64 / 5.0).ln() + 1.609_437_912_434_100).abs() < 1e-9);
    }

    #[test]
    fn umass_matches_hand_enumeration() {
        let bow = build_bow(
            &[
                doc("a", &["fever", "cough"]),
                doc("b", &["fever", "cough", "mask"]),
                doc("c", &["mask"]),
                doc("d", &["fever"]),
            ],
            1,
            1.0,
        )
        .unwrap();
        let model = fit_lda(&bow, &config(1)).unwrap();
        let score = umass_coherence(&model, &bow, 3).unwrap();

        // exhaustively recompute over the topic's top-3 words
        let words = top_words(&model, 0, 3, &bow);
        let occurs = |w: &str| -> f64 {
            let id = bow.vocab.iter().position(|v| v == w).unwrap();
            bow.docs.iter().filter(|d| d.contains(&id)).count() as f64
        };
        let co = |a: &str, b: &str| -> f64 {
            let ia = bow.vocab.iter().position(|v| v == a).unwrap();
            let ib = bow.vocab.iter().position(|v| v == b).unwrap();
            bow.docs.iter().filter(|d| d.contains(&ia) && d.contains(&ib)).count() as f64
        };
        let mut expected = 0.0;
        for i in 1..words.len() {
            for j in 0..i {
                expected += ((co(&words[i].0, &words[j].0) + 1.0) / occurs(&words[j].0)).ln();
            }
        }
        assert!((score.per_topic[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn top_words_lexicographic_ties() {
        let bow = build_bow(&[doc("a", &["b", "a", "c"])], 1, 1.0).unwrap();
        let model = fit_lda(&bow, &config(1)).unwrap();
        let words = top_words(&model, 0, 3, &bow);
        // all counts equal, so order is lexicographic
        assert_eq!(words[0].0, "a");
        assert_eq!(words[1].0, "b");
        assert_eq!(words[2].0, "c");
    }

    #[test]
    fn saliency_zero_for_undistinctive_word() {
        // hand-built model: word 0 has identical phi across topics
        let bow = build_bow(&[doc("a", &["x", "y"]), doc("b", &["x", "y"])], 1, 1.0).unwrap();
        let model = TopicModel {
            config: config(2),
            z: vec![vec![0, 1], vec![0, 1]],
            n_dk: vec![vec![1, 1], vec![1, 1]],
            n_kw: vec![vec![1, 1], vec![1, 1]],
            n_k: vec![2, 2],
            phi: vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            theta: vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        };
        let ranking = saliency_ranking(&model, &bow, 10);
        for (_, s) in ranking {
            assert!(s.abs() < 1e-12);
        }
    }

    #[test]
    fn saliency_point_mass_is_ln2() {
        let bow = build_bow(&[doc("a", &["x", "y"]), doc("b", &["x", "y"])], 1, 1.0).unwrap();
        // word "x" only under topic 0, topics equally likely
        let model = TopicModel {
            config: config(2),
            z: vec![vec![0, 1], vec![0, 1]],
            n_dk: vec![vec![1, 1], vec![1, 1]],
            n_kw: vec![vec![2, 0], vec![0, 2]],
            n_k: vec![2, 2],
            phi: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            theta: vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        };
        let ranking = saliency_ranking(&model, &bow, 10);
        let x = ranking.iter().find(|(w, _)| w == "x").unwrap();
        // p(x) = 0.5, distinctiveness = ln 2
        assert!((x.1 - 0.5 * std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn sweep_single_k() {
        let bow = build_bow(
            &[doc("a", &["fever", "cough"]), doc("b", &["mask", "fever"])],
            1,
            1.0,
        )
        .unwrap();
        let rows = sweep(&bow, &[1], &config(1), 2).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].k, 1);
        assert!(rows[0].log_perplexity.is_finite());
        assert!((rows[0].perplexity - (-rows[0].log_perplexity).exp()).abs() < 1e-12);
    }
}
