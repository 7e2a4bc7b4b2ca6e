//! LDA topic modeling: bag-of-words encoding, collapsed Gibbs inference,
//! evaluation metrics (UMass coherence, per-word log likelihood), topic
//! summaries, saliency ranking, and the 2-D intertopic distance map.

mod bow;
mod intertopic;
mod lda;
mod metrics;

pub use bow::{build_bow, BowCorpus};
pub use intertopic::{intertopic_map, jensen_shannon, IntertopicMap};
pub use lda::{fit_lda, LdaConfig, TopicModel};
pub use metrics::{
    log_perplexity, saliency_ranking, sweep, top_words, umass_coherence, CoherenceScore, EvalRow,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TopicError {
    #[error("document-frequency bounds leave an empty vocabulary")]
    EmptyVocabulary,
    #[error("invalid LDA config: {0}")]
    InvalidConfig(String),
    #[error("degenerate topic: top word {0:?} occurs in no document")]
    DegenerateTopic(String),
}
