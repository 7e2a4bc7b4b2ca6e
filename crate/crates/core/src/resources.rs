//! Loading of the preprocessing resource files.
//!
//! Every lookup table the pipelines use (contractions, stopwords, gazetteer,
//! POS lexicon and suffix rules, lemma table and suffix rules) lives in a
//! plain data file so runs are auditable and reproducible. A compiled-in
//! copy of the shipped defaults is available via [`ResourceBundle::builtin`].

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::textprep::PosTag;

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file} line {line}: unknown POS tag {tag:?}")]
    UnknownTag { file: String, line: usize, tag: String },
    #[error("{file} line {line}: malformed row")]
    MalformedRow { file: String, line: usize },
}

/// Immutable lookup tables shared by both preprocessing pipelines.
#[derive(Debug, Clone)]
pub struct ResourceBundle {
    pub contraction_table: HashMap<String, String>,
    pub stopwords: HashSet<String>,
    /// Lowercase city/country phrases, stored space-joined.
    pub gazetteer: HashSet<String>,
    pub gazetteer_max_words: usize,
    pub pos_lexicon: HashMap<String, PosTag>,
    /// Ordered longest-suffix-first.
    pub pos_suffix_rules: Vec<(String, PosTag)>,
    /// (word, tag or None for wildcard) -> lemma.
    pub lemma_table: HashMap<(String, Option<PosTag>), String>,
    /// (suffix, replacement), ordered longest-suffix-first.
    pub lemma_suffix_rules: Vec<(String, String)>,
}

const CONTRACTIONS: &str = include_str!("../resources/contractions.tsv");
const STOPWORDS: &str = include_str!("../resources/stopwords.txt");
const GAZETTEER: &str = include_str!("../resources/gazetteer.txt");
const POS_LEXICON: &str = include_str!("../resources/pos_lexicon.tsv");
const POS_SUFFIX: &str = include_str!("../resources/pos_suffix.tsv");
const LEMMA_TABLE: &str = include_str!("../resources/lemma_table.tsv");
const LEMMA_SUFFIX: &str = include_str!("../resources/lemma_suffix.tsv");

/// The shipped COVID-19 screening lexicon (see the lexicon module).
pub const BUILTIN_LEXICON: &str = include_str!("../resources/lexicon.tsv");

fn data_lines(raw: &str) -> impl Iterator<Item = (usize, &str)> {
    raw.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

impl ResourceBundle {
    /// Parses all tables from in-memory file contents.
    #[allow(clippy::too_many_arguments)]
    pub fn from_strs(
        contractions: &str,
        stopwords: &str,
        gazetteer: &str,
        pos_lexicon: &str,
        pos_suffix: &str,
        lemma_table: &str,
        lemma_suffix: &str,
    ) -> Result<Self, ResourceError> {
        let mut contraction_table = HashMap::new();
        for (line, row) in data_lines(contractions) {
            let (key, value) = row.split_once('\t').ok_or(ResourceError::MalformedRow {
                file: "contractions".into(),
                line,
            })?;
            contraction_table.insert(key.to_lowercase(), value.to_lowercase());
        }

        let stopwords: HashSet<String> =
            data_lines(stopwords).map(|(_, l)| l.to_lowercase()).collect();

        let mut gazetteer_set = HashSet::new();
        let mut gazetteer_max_words = 1;
        for (_, row) in data_lines(gazetteer) {
            let phrase = row.to_lowercase();
            gazetteer_max_words = gazetteer_max_words.max(phrase.split(' ').count());
            gazetteer_set.insert(phrase);
        }

        let mut pos_map = HashMap::new();
        for (line, row) in data_lines(pos_lexicon) {
            let (word, tag) = row.split_once('\t').ok_or(ResourceError::MalformedRow {
                file: "pos_lexicon".into(),
                line,
            })?;
            let tag = PosTag::parse(tag.trim()).ok_or_else(|| ResourceError::UnknownTag {
                file: "pos_lexicon".into(),
                line,
                tag: tag.to_string(),
            })?;
            // first entry wins on duplicates
            pos_map.entry(word.to_lowercase()).or_insert(tag);
        }

        let mut pos_suffix_rules = Vec::new();
        for (line, row) in data_lines(pos_suffix) {
            let (suffix, tag) = row.split_once('\t').ok_or(ResourceError::MalformedRow {
                file: "pos_suffix".into(),
                line,
            })?;
            let tag = PosTag::parse(tag.trim()).ok_or_else(|| ResourceError::UnknownTag {
                file: "pos_suffix".into(),
                line,
                tag: tag.to_string(),
            })?;
            pos_suffix_rules.push((suffix.to_lowercase(), tag));
        }
        pos_suffix_rules.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));

        let mut lemma_map = HashMap::new();
        for (line, row) in data_lines(lemma_table) {
            let fields: Vec<&str> = row.split('\t').collect();
            let [word, tag, lemma] = fields.as_slice() else {
                return Err(ResourceError::MalformedRow {
                    file: "lemma_table".into(),
                    line,
                });
            };
            let tag = if tag.trim() == "*" {
                None
            } else {
                Some(PosTag::parse(tag.trim()).ok_or_else(|| ResourceError::UnknownTag {
                    file: "lemma_table".into(),
                    line,
                    tag: tag.to_string(),
                })?)
            };
            lemma_map.insert((word.to_lowercase(), tag), lemma.to_lowercase());
        }

        let mut lemma_suffix_rules = Vec::new();
        for (_, row) in data_lines(lemma_suffix) {
            let (suffix, replacement) = match row.split_once('\t') {
                Some((s, r)) => (s.to_lowercase(), r.to_lowercase()),
                None => (row.to_lowercase(), String::new()),
            };
            lemma_suffix_rules.push((suffix, replacement));
        }
        lemma_suffix_rules.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));

        Ok(Self {
            contraction_table,
            stopwords,
            gazetteer: gazetteer_set,
            gazetteer_max_words,
            pos_lexicon: pos_map,
            pos_suffix_rules,
            lemma_table: lemma_map,
            lemma_suffix_rules,
        })
    }

    /// The compiled-in default resources.
    pub fn builtin() -> Self {
        Self::from_strs(
            CONTRACTIONS,
            STOPWORDS,
            GAZETTEER,
            POS_LEXICON,
            POS_SUFFIX,
            LEMMA_TABLE,
            LEMMA_SUFFIX,
        )
        .expect("builtin resources are well-formed")
    }

    /// Loads the bundle from a directory holding the standard file names.
    pub fn from_dir(dir: &Path) -> Result<Self, ResourceError> {
        let read = |name: &str| -> Result<String, ResourceError> {
            let path = dir.join(name);
            fs::read_to_string(&path).map_err(|source| ResourceError::Io {
                path: path.display().to_string(),
                source,
            })
        };
        Self::from_strs(
            &read("contractions.tsv")?,
            &read("stopwords.txt")?,
            &read("gazetteer.txt")?,
            &read("pos_lexicon.tsv")?,
            &read("pos_suffix.tsv")?,
            &read("lemma_table.tsv")?,
            &read("lemma_suffix.tsv")?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_loads() {
        let bundle = ResourceBundle::builtin();
        assert!(bundle.contraction_table.contains_key("i've"));
        assert!(bundle.stopwords.contains("the"));
        assert!(bundle.gazetteer.contains("new york"));
        assert_eq!(bundle.gazetteer_max_words, 2);
        assert_eq!(bundle.pos_lexicon.get("sick"), Some(&PosTag::Adj));
        assert!(!bundle.pos_suffix_rules.is_empty());
        // longest-suffix-first ordering
        let lens: Vec<usize> = bundle.pos_suffix_rules.iter().map(|(s, _)| s.len()).collect();
        assert!(lens.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn lemma_wildcard_rows() {
        let bundle = ResourceBundle::builtin();
        assert_eq!(
            bundle.lemma_table.get(&("was".to_string(), Some(PosTag::Verb))),
            Some(&"be".to_string())
        );
        assert_eq!(bundle.lemma_table.get(&("was".to_string(), None)), Some(&"be".to_string()));
    }
}
