//! The basic and advanced preprocessing pipelines.
//!
//! Basic: lowercase, expand contractions, strip punctuation, tokenize,
//! redact date/time tokens, redact gazetteer locations, drop stopwords,
//! lemmatize. Advanced additionally keeps only ADJ/VERB/ADV/INTJ tokens
//! (tagged by lexicon lookup with suffix-rule fallback) before
//! lemmatization. Every stage is pure; token counts are recorded after
//! each stage for the audit trail.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ingest::Transcript;
pub use crate::resources::ResourceBundle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PosTag {
    Adj,
    Verb,
    Adv,
    Intj,
    Noun,
    Pron,
    Det,
    Adp,
    Num,
    Other,
    Untagged,
}

impl PosTag {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_uppercase().as_str() {
            "ADJ" => Some(Self::Adj),
            "VERB" => Some(Self::Verb),
            "ADV" => Some(Self::Adv),
            "INTJ" => Some(Self::Intj),
            "NOUN" => Some(Self::Noun),
            "PRON" => Some(Self::Pron),
            "DET" => Some(Self::Det),
            "ADP" => Some(Self::Adp),
            "NUM" => Some(Self::Num),
            "OTHER" => Some(Self::Other),
            "UNTAGGED" => Some(Self::Untagged),
            _ => None,
        }
    }
}

/// The four tags retained by the advanced pipeline.
pub const CONTENT_TAGS: [PosTag; 4] = [PosTag::Adj, PosTag::Verb, PosTag::Adv, PosTag::Intj];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// Empty until the lemmatization stage runs.
    pub lemma: String,
    pub pos: PosTag,
}

impl Token {
    fn new(surface: &str) -> Self {
        Self {
            surface: surface.to_string(),
            lemma: String::new(),
            pos: PosTag::Untagged,
        }
    }

    /// The lemma when set, else the surface form.
    pub fn term(&self) -> &str {
        if self.lemma.is_empty() {
            &self.surface
        } else {
            &self.lemma
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PipelineMode {
    Basic,
    Advanced,
}

impl std::fmt::Display for PipelineMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Basic => "basic",
            Self::Advanced => "advanced",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TokenizedDoc {
    pub doc_id: String,
    pub tokens: Vec<Token>,
    /// (stage name, token count after the stage), in pipeline order.
    pub stage_counts: Vec<(String, usize)>,
    pub mode: PipelineMode,
}

/// Unicode-aware lowercasing.
pub fn normalize_case(text: &str) -> String {
    text.to_lowercase()
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\''
}

/// Replaces every whole-word occurrence of a table key by its expansion.
///
/// Expects lowercased text; runs before punctuation stripping so apostrophes
/// inside contractions are still intact.
pub fn expand_contractions(text: &str, table: &std::collections::HashMap<String, String>) -> String {
    let mut out: Vec<String> = Vec::new();
    for raw in text.split_whitespace() {
        let start = raw.find(is_word_char).unwrap_or(raw.len());
        let end = raw.rfind(is_word_char).map(|i| i + raw[i..].chars().next().unwrap().len_utf8());
        let (lead, core, trail) = match end {
            Some(end) if start < end => (&raw[..start], &raw[start..end], &raw[end..]),
            _ => (raw, "", ""),
        };
        match table.get(core) {
            Some(expansion) => out.push(format!("{lead}{expansion}{trail}")),
            None => out.push(raw.to_string()),
        }
    }
    out.join(" ")
}

/// Maps every non-alphanumeric, non-whitespace character to a space and
/// collapses the resulting runs. Covers punctuation, symbols, and emoji.
pub fn strip_punctuation(text: &str) -> String {
    let replaced: String = text
        .chars()
        .map(|c| if c.is_alphanumeric() || c.is_whitespace() { c } else { ' ' })
        .collect();
    replaced.split_whitespace().collect::<Vec<_>>().join(" ")
}

const MONTHS: [&str; 12] = [
    "january", "february", "march", "april", "may", "june", "july", "august", "september",
    "october", "november", "december",
];
const WEEKDAYS: [&str; 7] = [
    "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday",
];

fn is_year(token: &str) -> bool {
    token.len() == 4
        && token.chars().all(|c| c.is_ascii_digit())
        && (token.starts_with("19") || token.starts_with("20"))
}

/// `10pm`, `10:30`, `10:30pm`, `10:30:15`.
fn is_clock(token: &str) -> bool {
    let body = token
        .strip_suffix("am")
        .or_else(|| token.strip_suffix("pm"))
        .unwrap_or(token);
    if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit() || c == ':') {
        return false;
    }
    let parts: Vec<&str> = body.split(':').collect();
    match parts.as_slice() {
        [h] => body.len() < token.len() && !h.is_empty() && h.len() <= 2,
        [h, m] | [h, m, _] => {
            !h.is_empty() && h.len() <= 2 && m.len() == 2 && parts.iter().all(|p| !p.is_empty())
        }
        _ => false,
    }
}

fn is_datetime_token(token: &str) -> bool {
    MONTHS.contains(&token) || WEEKDAYS.contains(&token) || is_year(token) || is_clock(token)
}

/// Removes month, weekday, 1900-2099 year, and clock tokens. Ordinal words
/// and bare small numbers are kept.
pub fn redact_datetimes(tokens: Vec<Token>) -> Vec<Token> {
    tokens
        .into_iter()
        .filter(|t| !is_datetime_token(&t.surface))
        .collect()
}

/// Removes gazetteer entries, greedily matching the longest phrase first.
pub fn redact_locations(tokens: Vec<Token>, resources: &ResourceBundle) -> Vec<Token> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        let max = resources.gazetteer_max_words.min(tokens.len() - i);
        let mut matched = 0;
        for len in (1..=max).rev() {
            let phrase = tokens[i..i + len]
                .iter()
                .map(|t| t.surface.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            if resources.gazetteer.contains(&phrase) {
                matched = len;
                break;
            }
        }
        if matched > 0 {
            i += matched;
        } else {
            out.push(tokens[i].clone());
            i += 1;
        }
    }
    out
}

/// Exact-match stopword removal.
pub fn drop_stopwords(tokens: Vec<Token>, resources: &ResourceBundle) -> Vec<Token> {
    tokens
        .into_iter()
        .filter(|t| !resources.stopwords.contains(&t.surface))
        .collect()
}

/// Assigns a tag to every token: lexicon lookup, then the longest matching
/// suffix rule, else OTHER.
pub fn tag_pos(mut tokens: Vec<Token>, resources: &ResourceBundle) -> Vec<Token> {
    for token in &mut tokens {
        token.pos = lookup_pos(&token.surface, resources);
    }
    tokens
}

fn lookup_pos(word: &str, resources: &ResourceBundle) -> PosTag {
    if let Some(tag) = resources.pos_lexicon.get(word) {
        return *tag;
    }
    for (suffix, tag) in &resources.pos_suffix_rules {
        // require a stem of at least two characters beyond the suffix
        if word.len() > suffix.len() + 1 && word.ends_with(suffix.as_str()) {
            return *tag;
        }
    }
    PosTag::Other
}

/// Keeps only tokens whose tag is in `keep`, preserving order.
pub fn filter_pos(tokens: Vec<Token>, keep: &[PosTag]) -> Vec<Token> {
    tokens.into_iter().filter(|t| keep.contains(&t.pos)).collect()
}

fn has_vowel(s: &str) -> bool {
    s.chars().any(|c| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y'))
}

fn is_consonant(c: char) -> bool {
    c.is_ascii_alphabetic() && !matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

/// Table lookup wins; otherwise the first applicable suffix rule
/// (longest-suffix-first, with doubled-consonant cleanup for -ing/-ed);
/// identity as the fallback.
pub fn lemmatize(word: &str, tag: PosTag, resources: &ResourceBundle) -> String {
    let key = (word.to_string(), Some(tag));
    if let Some(lemma) = resources.lemma_table.get(&key) {
        return lemma.clone();
    }
    if let Some(lemma) = resources.lemma_table.get(&(word.to_string(), None)) {
        return lemma.clone();
    }
    for (suffix, replacement) in &resources.lemma_suffix_rules {
        if let Some(stem) = word.strip_suffix(suffix.as_str()) {
            let candidate = format!("{stem}{replacement}");
            if candidate.len() < 3 || !has_vowel(&candidate) {
                continue;
            }
            if (suffix == "ing" || suffix == "ed") && replacement.is_empty() {
                let chars: Vec<char> = candidate.chars().collect();
                let n = chars.len();
                if n >= 2
                    && chars[n - 1] == chars[n - 2]
                    && is_consonant(chars[n - 1])
                    && !matches!(chars[n - 1], 'l' | 's' | 'z')
                {
                    return candidate[..candidate.len() - 1].to_string();
                }
            }
            return candidate;
        }
    }
    word.to_string()
}

fn apply_lemmas(mut tokens: Vec<Token>, resources: &ResourceBundle) -> Vec<Token> {
    for token in &mut tokens {
        token.lemma = lemmatize(&token.surface, token.pos, resources);
    }
    tokens
}

/// Runs the full pipeline for one transcript.
pub fn preprocess(doc: &Transcript, mode: PipelineMode, resources: &ResourceBundle) -> TokenizedDoc {
    let text = normalize_case(&doc.full_text);
    let text = expand_contractions(&text, &resources.contraction_table);
    let text = strip_punctuation(&text);

    let mut stage_counts = Vec::new();
    let record = |name: &str, tokens: &[Token], counts: &mut Vec<(String, usize)>| {
        counts.push((name.to_string(), tokens.len()));
    };

    let mut tokens: Vec<Token> = text.split_whitespace().map(Token::new).collect();
    record("tokenize", &tokens, &mut stage_counts);

    tokens = redact_datetimes(tokens);
    record("redact_datetimes", &tokens, &mut stage_counts);

    tokens = redact_locations(tokens, resources);
    record("redact_locations", &tokens, &mut stage_counts);

    tokens = drop_stopwords(tokens, resources);
    record("drop_stopwords", &tokens, &mut stage_counts);

    if mode == PipelineMode::Advanced {
        tokens = tag_pos(tokens, resources);
        record("tag_pos", &tokens, &mut stage_counts);
        tokens = filter_pos(tokens, &CONTENT_TAGS);
        record("filter_pos", &tokens, &mut stage_counts);
    } else {
        tokens = tag_pos(tokens, resources);
        record("tag_pos", &tokens, &mut stage_counts);
    }

    tokens = apply_lemmas(tokens, resources);
    record("lemmatize", &tokens, &mut stage_counts);

    TokenizedDoc {
        doc_id: doc.doc_id.clone(),
        tokens,
        stage_counts,
        mode,
    }
}

/// Fixed-width histogram over per-document token counts.
pub fn token_histogram(docs: &[TokenizedDoc], bucket_width: usize) -> BTreeMap<usize, usize> {
    assert!(bucket_width > 0, "bucket width must be positive");
    let mut histogram = BTreeMap::new();
    for doc in docs {
        let bucket = doc.tokens.len() / bucket_width * bucket_width;
        *histogram.entry(bucket).or_insert(0) += 1;
    }
    histogram
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    fn resources() -> &'static ResourceBundle {
        static BUNDLE: OnceLock<ResourceBundle> = OnceLock::new();
        BUNDLE.get_or_init(ResourceBundle::builtin)
    }

    fn toks(words: &[&str]) -> Vec<Token> {
        words.iter().map(|w| Token::new(w)).collect()
    }

    fn surfaces(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    #[test]
    fn normalize_case_examples() {
        assert_eq!(normalize_case("COVID Got Me"), "covid got me");
        assert_eq!(normalize_case(""), "");
        assert_eq!(normalize_case("I'VE"), "i've");
    }

    #[test]
    fn expand_contractions_examples() {
        let table = &resources().contraction_table;
        assert_eq!(expand_contractions("i've been sick", table), "i have been sick");
        assert_eq!(expand_contractions("naive", table), "naive");
        assert_eq!(expand_contractions("can't won't", table), "cannot will not");
    }

    #[test]
    fn contraction_with_trailing_punctuation() {
        let table = &resources().contraction_table;
        assert_eq!(expand_contractions("i've, sadly", table), "i have, sadly");
    }

    #[test]
    fn strip_punctuation_examples() {
        assert_eq!(strip_punctuation("fever, cough!"), "fever cough");
        assert_eq!(strip_punctuation("covid-19"), "covid 19");
        assert_eq!(strip_punctuation("..."), "");
    }

    #[test]
    fn strip_punctuation_idempotent() {
        let once = strip_punctuation("a--b... c!? d");
        assert_eq!(strip_punctuation(&once), once);
    }

    #[test]
    fn redact_datetimes_examples() {
        let out = redact_datetimes(toks(&["on", "march", "third", "i", "tested"]));
        assert_eq!(surfaces(&out), vec!["on", "third", "i", "tested"]);
        let out = redact_datetimes(toks(&["at", "10pm"]));
        assert_eq!(surfaces(&out), vec!["at"]);
        let out = redact_datetimes(toks(&["i", "was", "19"]));
        assert_eq!(surfaces(&out), vec!["i", "was", "19"]);
    }

    #[test]
    fn redact_datetimes_years_and_clocks() {
        let out = redact_datetimes(toks(&["in", "2020", "at", "10:30", "and", "1899"]));
        assert_eq!(surfaces(&out), vec!["in", "at", "and", "1899"]);
    }

    #[test]
    fn redact_locations_examples() {
        let r = resources();
        let out = redact_locations(toks(&["i", "live", "in", "london"]), r);
        assert_eq!(surfaces(&out), vec!["i", "live", "in"]);
        let out = redact_locations(toks(&["new", "york", "was", "locked"]), r);
        assert_eq!(surfaces(&out), vec!["was", "locked"]);
        let out = redact_locations(vec![], r);
        assert!(out.is_empty());
    }

    #[test]
    fn drop_stopwords_examples() {
        let r = resources();
        let out = drop_stopwords(toks(&["i", "have", "a", "fever"]), r);
        assert_eq!(surfaces(&out), vec!["fever"]);
        let out = drop_stopwords(toks(&["fever"]), r);
        assert_eq!(surfaces(&out), vec!["fever"]);
        let out = drop_stopwords(toks(&["i", "the", "a"]), r);
        assert!(out.is_empty());
    }

    #[test]
    fn tag_pos_paper_words() {
        let r = resources();
        assert_eq!(lookup_pos("sick", r), PosTag::Adj);
        assert_eq!(lookup_pos("unsure", r), PosTag::Adj);
        assert_eq!(lookup_pos("got", r), PosTag::Verb);
        assert_eq!(lookup_pos("thought", r), PosTag::Verb);
        assert_eq!(lookup_pos("eventually", r), PosTag::Adv);
    }

    #[test]
    fn tag_pos_suffix_fallback() {
        let r = resources();
        // not in the lexicon, resolved by suffix rules
        assert_eq!(lookup_pos("miraculously", r), PosTag::Adv);
        assert_eq!(lookup_pos("blargified", r), PosTag::Verb);
        assert_eq!(lookup_pos("xyzzy", r), PosTag::Other);
    }

    #[test]
    fn filter_pos_examples() {
        let r = resources();
        let tagged = tag_pos(toks(&["covid", "was", "bad"]), r);
        let kept = filter_pos(tagged, &CONTENT_TAGS);
        assert_eq!(surfaces(&kept), vec!["was", "bad"]);
        let tagged = tag_pos(toks(&["covid", "virus"]), r);
        assert!(filter_pos(tagged, &CONTENT_TAGS).is_empty());
        let tagged = tag_pos(toks(&["bad"]), r);
        assert!(filter_pos(tagged, &[]).is_empty());
    }

    #[test]
    fn lemmatize_examples() {
        let r = resources();
        assert_eq!(lemmatize("symptoms", PosTag::Noun, r), "symptom");
        assert_eq!(lemmatize("was", PosTag::Verb, r), "be");
        assert_eq!(lemmatize("fever", PosTag::Noun, r), "fever");
    }

    #[test]
    fn lemmatize_suffix_rules() {
        let r = resources();
        assert_eq!(lemmatize("remedies", PosTag::Noun, r), "remedy");
        assert_eq!(lemmatize("running", PosTag::Verb, r), "run");
        assert_eq!(lemmatize("stopped", PosTag::Verb, r), "stop");
        assert_eq!(lemmatize("falling", PosTag::Verb, r), "fall");
        // too short to strip
        assert_eq!(lemmatize("bed", PosTag::Noun, r), "bed");
    }

    fn transcript(text: &str) -> Transcript {
        Transcript {
            doc_id: "t".into(),
            cues: vec![],
            full_text: text.into(),
            dropped_notes: 0,
        }
    }

    const FICTITIOUS: &str = "covid was quite bad for me since I was first unsure about the \
        virus, and everyone was going into lockdown. I got sick and I thought I was not going \
        to make it. I took painkillers and other medicine and eventually recovered thank goodness";

    #[test]
    fn advanced_keeps_content_words_drops_nouns() {
        let doc = transcript(FICTITIOUS);
        let out = preprocess(&doc, PipelineMode::Advanced, resources());
        let surf: Vec<&str> = out.tokens.iter().map(|t| t.surface.as_str()).collect();
        for kept in ["sick", "unsure", "got", "thought", "eventually"] {
            assert!(surf.contains(&kept), "missing {kept}: {surf:?}");
        }
        for dropped in ["covid", "virus", "lockdown", "painkillers", "medicine", "goodness"] {
            assert!(!surf.contains(&dropped), "unexpected {dropped}: {surf:?}");
        }
    }

    #[test]
    fn empty_transcript_all_counts_zero() {
        let doc = transcript("");
        let out = preprocess(&doc, PipelineMode::Advanced, resources());
        assert!(out.tokens.is_empty());
        assert!(out.stage_counts.iter().all(|(_, c)| *c == 0));
    }

    #[test]
    fn advanced_count_le_basic() {
        let doc = transcript(FICTITIOUS);
        let basic = preprocess(&doc, PipelineMode::Basic, resources());
        let advanced = preprocess(&doc, PipelineMode::Advanced, resources());
        assert!(advanced.tokens.len() <= basic.tokens.len());
    }

    #[test]
    fn stage_counts_monotone() {
        let doc = transcript(FICTITIOUS);
        for mode in [PipelineMode::Basic, PipelineMode::Advanced] {
            let out = preprocess(&doc, mode, resources());
            let counts: Vec<usize> = out.stage_counts.iter().map(|(_, c)| *c).collect();
            assert!(counts.windows(2).all(|w| w[0] >= w[1]), "{:?}", out.stage_counts);
            assert_eq!(*counts.last().unwrap(), out.tokens.len());
        }
    }

    #[test]
    fn histogram_examples() {
        let mk = |id: &str, n: usize| TokenizedDoc {
            doc_id: id.into(),
            tokens: (0..n).map(|i| Token::new(&format!("w{i}"))).collect(),
            stage_counts: vec![],
            mode: PipelineMode::Basic,
        };
        let docs = vec![mk("a", 5), mk("b", 5), mk("c", 12)];
        let h = token_histogram(&docs, 10);
        assert_eq!(h.get(&0), Some(&2));
        assert_eq!(h.get(&10), Some(&1));
        assert_eq!(h.values().sum::<usize>(), docs.len());
        assert!(token_histogram(&[], 10).is_empty());
    }
}
