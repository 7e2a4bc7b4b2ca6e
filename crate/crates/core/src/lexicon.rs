//! Categorized disease-lexicon screening.
//!
//! Terms are grouped into six categories; matching runs on basic-mode
//! preprocessed documents (lemmas first, then surfaces), with multi-word
//! phrases matched as contiguous token sequences. The corpus report mirrors
//! the two-table layout of the source analysis: per-category prevalence and
//! a histogram of how many categories each document touches.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textprep::TokenizedDoc;

pub const CATEGORY_COUNT: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LexiconCategory {
    GenericTerms,
    Symptoms,
    VariantsAndNames,
    MedicalEquipment,
    Medicines,
    Vaccines,
}

impl LexiconCategory {
    pub const ALL: [Self; CATEGORY_COUNT] = [
        Self::GenericTerms,
        Self::Symptoms,
        Self::VariantsAndNames,
        Self::MedicalEquipment,
        Self::Medicines,
        Self::Vaccines,
    ];

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_lowercase().as_str() {
            "genericterms" | "generic terms" => Some(Self::GenericTerms),
            "symptoms" => Some(Self::Symptoms),
            "variantsandnames" | "variants and names" => Some(Self::VariantsAndNames),
            "medicalequipment" | "medical equipment" => Some(Self::MedicalEquipment),
            "medicines" => Some(Self::Medicines),
            "vaccines" => Some(Self::Vaccines),
            _ => None,
        }
    }
}

impl fmt::Display for LexiconCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::GenericTerms => "GenericTerms",
            Self::Symptoms => "Symptoms",
            Self::VariantsAndNames => "VariantsAndNames",
            Self::MedicalEquipment => "MedicalEquipment",
            Self::Medicines => "Medicines",
            Self::Vaccines => "Vaccines",
        })
    }
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: unknown category {value:?}")]
    UnknownCategory { line: usize, value: String },
    #[error("duplicate phrase: {0}")]
    DuplicatePhrase(String),
    #[error("line {line}: malformed row")]
    MalformedRow { line: usize },
    #[error("no documents to report on")]
    EmptyCorpus,
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LexiconTerm {
    pub phrase: String,
    pub category: LexiconCategory,
    pub source: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lexicon {
    pub terms: Vec<LexiconTerm>,
}

impl Lexicon {
    /// Parses TSV rows `phrase<TAB>category[<TAB>source]`. `#` lines are comments.
    pub fn parse(raw: &str) -> Result<Self, LexiconError> {
        let mut terms = Vec::new();
        let mut seen = HashSet::new();
        for (idx, line) in raw.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let (phrase, category, source) = match fields.as_slice() {
                [p, c] => (*p, *c, None),
                [p, c, s] => (*p, *c, Some(s.to_string())),
                _ => return Err(LexiconError::MalformedRow { line: idx + 1 }),
            };
            let phrase = phrase.trim().to_lowercase();
            if !seen.insert(phrase.clone()) {
                return Err(LexiconError::DuplicatePhrase(phrase));
            }
            let category =
                LexiconCategory::parse(category).ok_or_else(|| LexiconError::UnknownCategory {
                    line: idx + 1,
                    value: category.to_string(),
                })?;
            terms.push(LexiconTerm { phrase, category, source });
        }
        Ok(Self { terms })
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let raw = fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&raw)
    }

    /// The shipped default lexicon (200 terms, Table-2 category sizes).
    pub fn builtin() -> Self {
        Self::parse(crate::resources::BUILTIN_LEXICON).expect("builtin lexicon is well-formed")
    }

    pub fn category_counts(&self) -> BTreeMap<LexiconCategory, usize> {
        let mut counts: BTreeMap<LexiconCategory, usize> =
            LexiconCategory::ALL.iter().map(|c| (*c, 0)).collect();
        for term in &self.terms {
            *counts.get_mut(&term.category).unwrap() += 1;
        }
        counts
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Per-document match profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DocLexiconProfile {
    pub doc_id: String,
    pub hits: BTreeMap<LexiconCategory, BTreeSet<String>>,
    pub categories_present: usize,
}

/// Matches the lexicon against one preprocessed document.
///
/// Single words match on lemma or surface; multi-word phrases match as
/// contiguous token runs where each position matches on lemma or surface.
pub fn match_document(doc: &TokenizedDoc, lexicon: &Lexicon) -> DocLexiconProfile {
    // word -> positions where either lemma or surface equals it
    let mut positions: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, token) in doc.tokens.iter().enumerate() {
        positions.entry(token.term()).or_default().push(i);
        if !token.lemma.is_empty() && token.lemma != token.surface {
            positions.entry(token.surface.as_str()).or_default().push(i);
        }
    }

    let matches_at = |word: &str, pos: usize| -> bool {
        doc.tokens
            .get(pos)
            .map(|t| t.surface == word || t.lemma == word)
            .unwrap_or(false)
    };

    let mut hits: BTreeMap<LexiconCategory, BTreeSet<String>> = BTreeMap::new();
    for term in &lexicon.terms {
        let words: Vec<&str> = term.phrase.split(' ').collect();
        let found = match words.as_slice() {
            [single] => positions.contains_key(single),
            [first, rest @ ..] => positions
                .get(first)
                .map(|starts| {
                    starts.iter().any(|&start| {
                        rest.iter()
                            .enumerate()
                            .all(|(offset, word)| matches_at(word, start + offset + 1))
                    })
                })
                .unwrap_or(false),
            [] => false,
        };
        if found {
            hits.entry(term.category).or_default().insert(term.phrase.clone());
        }
    }

    let categories_present = hits.values().filter(|set| !set.is_empty()).count();
    DocLexiconProfile {
        doc_id: doc.doc_id.clone(),
        hits,
        categories_present,
    }
}

/// Corpus-level report: category prevalence and coverage histogram, both as
/// percentages rounded to two decimals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LexiconReport {
    pub doc_count: usize,
    pub category_prevalence: BTreeMap<LexiconCategory, f64>,
    /// k categories hit -> percentage of documents, for k in 0..=6.
    pub coverage_histogram: BTreeMap<usize, f64>,
}

fn pct(numerator: usize, denominator: usize) -> f64 {
    (100.0 * numerator as f64 / denominator as f64 * 100.0).round() / 100.0
}

pub fn corpus_report(profiles: &[DocLexiconProfile]) -> Result<LexiconReport, LexiconError> {
    if profiles.is_empty() {
        return Err(LexiconError::EmptyCorpus);
    }
    let n = profiles.len();

    let mut category_prevalence = BTreeMap::new();
    for category in LexiconCategory::ALL {
        let hits = profiles
            .iter()
            .filter(|p| p.hits.get(&category).map(|s| !s.is_empty()).unwrap_or(false))
            .count();
        category_prevalence.insert(category, pct(hits, n));
    }

    let mut coverage_histogram = BTreeMap::new();
    for k in 0..=CATEGORY_COUNT {
        let count = profiles.iter().filter(|p| p.categories_present == k).count();
        coverage_histogram.insert(k, pct(count, n));
    }

    Ok(LexiconReport {
        doc_count: n,
        category_prevalence,
        coverage_histogram,
    })
}
