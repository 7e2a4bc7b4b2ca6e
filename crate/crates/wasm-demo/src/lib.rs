//! Thin wasm-bindgen wrappers over the core toolkit for the static demo
//! page in `www/`. Input is pasted transcript text; blank lines split it
//! into pseudo-documents so the corpus-level analytics have something to
//! chew on.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use vlogscreen::cloud::{layout_cloud, render_svg, CloudConfig};
use vlogscreen::ingest::Transcript;
use vlogscreen::lexicon::{match_document, Lexicon};
use vlogscreen::ngram::tfidf;
use vlogscreen::textprep::{preprocess, PipelineMode};
use vlogscreen::topic::{build_bow, fit_lda, intertopic_map, top_words, LdaConfig};
use vlogscreen::{ResourceBundle, TokenizedDoc};

fn parse_mode(mode: &str) -> Result<PipelineMode, String> {
    match mode {
        "basic" => Ok(PipelineMode::Basic),
        "advanced" => Ok(PipelineMode::Advanced),
        other => Err(format!("unknown mode {other:?}")),
    }
}

fn pseudo_docs(text: &str, mode: PipelineMode) -> Vec<TokenizedDoc> {
    let resources = ResourceBundle::builtin();
    text.split("\n\n")
        .map(str::trim)
        .filter(|chunk| !chunk.is_empty())
        .enumerate()
        .map(|(i, chunk)| {
            let transcript = Transcript {
                doc_id: format!("pasted-{i}"),
                cues: vec![],
                full_text: chunk.to_string(),
                dropped_notes: 0,
            };
            preprocess(&transcript, mode, &resources)
        })
        .collect()
}

/// TF-IDF word cloud of the pasted text as an SVG document.
#[wasm_bindgen]
pub fn word_cloud_svg(text: &str, mode: &str, order: u32, seed: u32) -> Result<String, String> {
    let docs = pseudo_docs(text, parse_mode(mode)?);
    if docs.iter().all(|d| d.tokens.is_empty()) {
        return Err("no tokens survive preprocessing".to_string());
    }
    let table =
        tfidf(&docs, order as usize).map_err(|e| e.to_string())?;
    let ranked: Vec<(String, f64)> = table
        .rows
        .iter()
        .map(|row| (row.gram.clone(), row.weight))
        .collect();
    let config = CloudConfig {
        seed: seed as u64,
        ..CloudConfig::default()
    };
    let layout = layout_cloud(&ranked, &config).map_err(|e| e.to_string())?;
    Ok(render_svg(&layout))
}

#[derive(Serialize)]
struct LexiconHits {
    doc_count: usize,
    categories_present: usize,
    hits: Vec<(String, Vec<String>)>,
}

/// Disease-lexicon screening of the pasted text, as JSON.
#[wasm_bindgen]
pub fn lexicon_screen(text: &str) -> Result<String, String> {
    let docs = pseudo_docs(text, PipelineMode::Basic);
    let lexicon = Lexicon::builtin();
    let mut merged: std::collections::BTreeMap<String, std::collections::BTreeSet<String>> =
        Default::default();
    for doc in &docs {
        let profile = match_document(doc, &lexicon);
        for (category, phrases) in profile.hits {
            if !phrases.is_empty() {
                merged.entry(category.to_string()).or_default().extend(phrases);
            }
        }
    }
    let result = LexiconHits {
        doc_count: docs.len(),
        categories_present: merged.len(),
        hits: merged
            .into_iter()
            .map(|(category, phrases)| (category, phrases.into_iter().collect()))
            .collect(),
    };
    serde_json::to_string(&result).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct TopicsJson {
    k: usize,
    topics: Vec<TopicJson>,
    coords: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct TopicJson {
    marginal: f64,
    top_words: Vec<(String, f64)>,
}

/// Quick LDA fit over the pasted pseudo-documents, as JSON.
#[wasm_bindgen]
pub fn topic_summary(text: &str, k: u32, seed: u32) -> Result<String, String> {
    let docs = pseudo_docs(text, PipelineMode::Basic);
    let bow = build_bow(&docs, 1, 1.0).map_err(|e| e.to_string())?;
    let config = LdaConfig {
        iterations: 120,
        burn_in: 40,
        seed: seed as u64,
        ..LdaConfig::with_topics(k as usize)
    };
    let model = fit_lda(&bow, &config).map_err(|e| e.to_string())?;
    let map = intertopic_map(&model);
    let marginals = model.topic_marginals();
    let out = TopicsJson {
        k: k as usize,
        topics: (0..k as usize)
            .map(|topic| TopicJson {
                marginal: marginals[topic],
                top_words: top_words(&model, topic, 8, &bow),
            })
            .collect(),
        coords: map.coords,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}
