//! Cross-module invariants checked on randomized inputs.

use std::collections::{BTreeMap, HashMap, HashSet};

use proptest::prelude::*;

use vlogscreen::ingest::{parse_vtt, strip_caption_suffix, Transcript, VttCue};
use vlogscreen::lexicon::{corpus_report, match_document, Lexicon};
use vlogscreen::ngram::{extract_ngrams, tfidf};
use vlogscreen::textprep::{preprocess, token_histogram, PipelineMode, PosTag, Token};
use vlogscreen::ResourceBundle;

fn word() -> impl Strategy<Value = String> {
    "[a-z]{1,8}"
}

fn corpus_word() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec![
        "fever", "cough", "mask", "virus", "rest", "water", "home", "test",
    ])
}

fn tok(surface: &str) -> Token {
    Token {
        surface: surface.to_string(),
        lemma: String::new(),
        pos: PosTag::Untagged,
    }
}

fn doc(id: &str, words: &[&str]) -> vlogscreen::TokenizedDoc {
    vlogscreen::TokenizedDoc {
        doc_id: id.to_string(),
        tokens: words.iter().map(|w| tok(w)).collect(),
        stage_counts: vec![],
        mode: PipelineMode::Basic,
    }
}

proptest! {
    #[test]
    fn caption_suffix_strip_is_idempotent(name in "[A-Za-z0-9_. ]{0,40}") {
        let once = strip_caption_suffix(&name);
        prop_assert_eq!(strip_caption_suffix(&once), once.clone());
        prop_assert!(!once.ends_with(".vtt"));
    }

    #[test]
    fn vtt_round_trips(
        cue_words in prop::collection::vec(prop::collection::vec(word(), 1..5), 1..6),
        start in 0u64..3_000_000,
        gap in 1u64..60_000,
    ) {
        let mut cues = Vec::new();
        let mut t = start;
        for words in &cue_words {
            cues.push(VttCue { start_ms: t, end_ms: t + gap, text: words.join(" ") });
            t += gap * 2;
        }
        let original = Transcript {
            doc_id: "d".into(),
            cues,
            full_text: cue_words
                .iter()
                .map(|w| w.join(" "))
                .collect::<Vec<_>>()
                .join(" "),
            dropped_notes: 0,
        };
        let reparsed = parse_vtt("d", &original.to_vtt()).unwrap();
        prop_assert_eq!(reparsed, original);
    }

    #[test]
    fn pipeline_counts_monotone_and_modes_nest(
        words in prop::collection::vec(word(), 0..60),
    ) {
        let resources = ResourceBundle::builtin();
        let transcript = Transcript {
            doc_id: "d".into(),
            cues: vec![],
            full_text: words.join(" "),
            dropped_notes: 0,
        };
        let basic = preprocess(&transcript, PipelineMode::Basic, &resources);
        let advanced = preprocess(&transcript, PipelineMode::Advanced, &resources);

        for doc in [&basic, &advanced] {
            for pair in doc.stage_counts.windows(2) {
                prop_assert!(pair[1].1 <= pair[0].1, "stage grew: {:?}", doc.stage_counts);
            }
            prop_assert_eq!(doc.stage_counts.last().unwrap().1, doc.tokens.len());
        }

        // advanced output is a sub-multiset of basic output
        let mut basic_counts: HashMap<&str, usize> = HashMap::new();
        for t in &basic.tokens {
            *basic_counts.entry(t.term()).or_insert(0) += 1;
        }
        let mut adv_counts: HashMap<&str, usize> = HashMap::new();
        for t in &advanced.tokens {
            *adv_counts.entry(t.term()).or_insert(0) += 1;
        }
        for (term, &count) in &adv_counts {
            prop_assert!(basic_counts.get(term).copied().unwrap_or(0) >= count);
        }
        for t in &advanced.tokens {
            prop_assert!(vlogscreen::textprep::CONTENT_TAGS.contains(&t.pos));
        }
    }

    #[test]
    fn tfidf_matches_brute_force(
        docs_words in prop::collection::vec(prop::collection::vec(corpus_word(), 1..30), 1..6),
        n in 1usize..3,
    ) {
        let docs: Vec<_> = docs_words
            .iter()
            .enumerate()
            .map(|(i, words)| doc(&format!("d{i}"), words))
            .collect();
        let table = tfidf(&docs, n).unwrap();

        // independent recomputation straight from the definitions
        let per_doc: Vec<HashMap<String, usize>> =
            docs.iter().map(|d| extract_ngrams(d, n)).collect();
        let mut df: HashMap<String, usize> = HashMap::new();
        for counts in &per_doc {
            for gram in counts.keys() {
                *df.entry(gram.clone()).or_insert(0) += 1;
            }
        }
        let big_n = docs.len() as f64;
        let mut expected: BTreeMap<String, f64> = BTreeMap::new();
        for counts in &per_doc {
            let raw: Vec<(&String, f64)> = counts
                .iter()
                .map(|(g, &tf)| {
                    let idf = ((1.0 + big_n) / (1.0 + df[g] as f64)).ln() + 1.0;
                    (g, tf as f64 * idf)
                })
                .collect();
            let norm = raw.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
            for (g, w) in raw {
                *expected.entry(g.clone()).or_insert(0.0) += w / norm;
            }
        }

        prop_assert_eq!(table.rows.len(), expected.len());
        for row in &table.rows {
            let want = expected[&row.gram];
            prop_assert!((row.weight - want).abs() < 1e-9, "{}: {} vs {}", row.gram, row.weight, want);
            prop_assert_eq!(row.df, df[&row.gram]);
        }
        // descending weight, lexicographic ties
        for pair in table.rows.windows(2) {
            prop_assert!(
                pair[0].weight > pair[1].weight
                    || (pair[0].weight == pair[1].weight && pair[0].gram < pair[1].gram)
            );
        }
    }

    #[test]
    fn coverage_histogram_is_a_distribution(
        docs_words in prop::collection::vec(prop::collection::vec(corpus_word(), 0..20), 1..8),
    ) {
        let lexicon = Lexicon::builtin();
        let profiles: Vec<_> = docs_words
            .iter()
            .enumerate()
            .map(|(i, words)| match_document(&doc(&format!("d{i}"), words), &lexicon))
            .collect();
        let report = corpus_report(&profiles).unwrap();

        let total: f64 = report.coverage_histogram.values().sum();
        prop_assert!((total - 100.0).abs() < 0.02 * 7.0, "histogram sums to {total}");
        prop_assert_eq!(report.coverage_histogram.len(), 7);
        for profile in &profiles {
            let nonempty = profile.hits.values().filter(|s| !s.is_empty()).count();
            prop_assert_eq!(profile.categories_present, nonempty);
        }
    }

    #[test]
    fn token_histogram_counts_every_doc(
        sizes in prop::collection::vec(0usize..500, 1..20),
        bucket in 1usize..200,
    ) {
        let docs: Vec<_> = sizes
            .iter()
            .enumerate()
            .map(|(i, &len)| doc(&format!("d{i}"), &vec!["w"; len]))
            .collect();
        let histogram = token_histogram(&docs, bucket);
        prop_assert_eq!(histogram.values().sum::<usize>(), docs.len());
        for (&lo, _) in &histogram {
            prop_assert_eq!(lo % bucket, 0);
        }
    }
}

#[test]
fn multiword_lexicon_terms_need_adjacency() {
    let lexicon = Lexicon::parse("sore throat\tSymptoms\n").unwrap();
    let hit = match_document(&doc("a", &["sore", "throat"]), &lexicon);
    assert_eq!(hit.categories_present, 1);
    let miss = match_document(&doc("b", &["sore", "very", "throat"]), &lexicon);
    assert_eq!(miss.categories_present, 0);
}

#[test]
fn builtin_lexicon_phrases_are_unique_and_lowercase() {
    let lexicon = Lexicon::builtin();
    let mut seen = HashSet::new();
    for term in &lexicon.terms {
        assert!(seen.insert(term.phrase.clone()), "duplicate {}", term.phrase);
        assert_eq!(term.phrase, term.phrase.to_lowercase());
        assert!(!term.phrase.trim().is_empty());
    }
}
