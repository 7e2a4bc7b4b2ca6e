//! Corpus analytics for health-related spoken-video transcripts.
//!
//! The pipeline: parse WebVTT transcript files into a corpus, run one of two
//! preprocessing pipelines (basic or advanced), screen against a categorized
//! disease lexicon, rank TF-IDF n-grams with word-cloud rendering, and fit
//! LDA topic models with coherence, perplexity, saliency, and intertopic
//! distance analytics.

pub mod cloud;
pub mod ingest;
pub mod lexicon;
pub mod ngram;
pub mod resources;
pub mod textprep;
pub mod topic;

pub use ingest::{Corpus, CorpusManifest, Transcript, VttCue};
pub use lexicon::{Lexicon, LexiconReport};
pub use textprep::{PipelineMode, ResourceBundle, TokenizedDoc};
pub use topic::{BowCorpus, LdaConfig, TopicModel};

