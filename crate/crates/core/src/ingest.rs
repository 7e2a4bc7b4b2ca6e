//! WebVTT transcript parsing and corpus assembly.
//!
//! Transcript files come from an ASR export: a `WEBVTT` signature line,
//! blank-line-separated cue blocks, and NOTE/metadata blocks (duration,
//! recognizability, language, confidence) that carry no spoken content.
//! Metadata is dropped but counted so the audit trail survives.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const CAPTION_MARKER: &str = "Autogenerated Caption";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: missing WEBVTT signature")]
    MalformedHeader { line: usize },
    #[error("line {line}: unparseable cue timing: {text}")]
    MalformedTimestamp { line: usize, text: String },
    #[error("duplicate doc_id in manifest: {0}")]
    DuplicateDocId(String),
    #[error("row {row}: unknown category {value:?}")]
    UnknownCategory { row: usize, value: String },
    #[error("manifest entry {0} has no transcript file")]
    MissingFile(String),
    #[error("{path}: invalid UTF-8")]
    InvalidUtf8 { path: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest: {0}")]
    Csv(#[from] csv::Error),
}

/// One timed caption: payload lines are joined with a single space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VttCue {
    pub start_ms: u64,
    pub end_ms: u64,
    pub text: String,
}

/// One parsed transcript file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub doc_id: String,
    pub cues: Vec<VttCue>,
    pub full_text: String,
    /// NOTE blocks and metadata lines discarded during parsing.
    pub dropped_notes: usize,
}

/// Removes the ASR export's trailing caption marker and the `.vtt` extension.
///
/// The marker is only stripped together with the extension, which keeps the
/// function idempotent: the result never ends in `.vtt`, so a second
/// application is the identity.
pub fn strip_caption_suffix(filename: &str) -> String {
    let mut name = filename;
    let mut had_ext = false;
    while let Some(stem) = name.strip_suffix(".vtt") {
        name = stem;
        had_ext = true;
    }
    if had_ext {
        for sep in ['_', ' '] {
            let marker = format!("{sep}{CAPTION_MARKER}");
            if let Some(stem) = name.strip_suffix(marker.as_str()) {
                return stem.to_string();
            }
        }
    }
    name.to_string()
}

fn parse_timestamp(s: &str) -> Option<u64> {
    // HH:MM:SS.mmm or MM:SS.mmm
    let (clock, millis) = s.split_once('.')?;
    if millis.len() != 3 {
        return None;
    }
    let millis: u64 = millis.parse().ok()?;
    let parts: Vec<&str> = clock.split(':').collect();
    let (h, m, sec) = match parts.as_slice() {
        [h, m, s] => (h.parse::<u64>().ok()?, m.parse::<u64>().ok()?, s.parse::<u64>().ok()?),
        [m, s] => (0, m.parse::<u64>().ok()?, s.parse::<u64>().ok()?),
        _ => return None,
    };
    if m >= 60 || sec >= 60 {
        return None;
    }
    Some(((h * 60 + m) * 60 + sec) * 1000 + millis)
}

fn format_timestamp(ms: u64) -> String {
    let h = ms / 3_600_000;
    let m = ms / 60_000 % 60;
    let s = ms / 1000 % 60;
    format!("{:02}:{:02}:{:02}.{:03}", h, m, s, ms % 1000)
}

/// Drops `<c>`-style styling/voice tags from a payload line.
fn strip_tags(line: &str) -> String {
    let mut out = String::with_capacity(line.len());
    let mut in_tag = false;
    for ch in line.chars() {
        match ch {
            '<' => in_tag = true,
            '>' => in_tag = false,
            c if !in_tag => out.push(c),
            _ => {}
        }
    }
    out
}

/// Looks like the start of a cue timing line (digits and a colon).
fn timestampish(line: &str) -> bool {
    let mut chars = line.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_digit())
        && line.chars().take(4).any(|c| c == ':')
}

/// Parses a WebVTT document into timed cues.
///
/// NOTE blocks, STYLE/REGION blocks, and bare `key:value` settings lines are
/// counted in `dropped_notes` and excluded from the text. A line that opens
/// with a timestamp but lacks `-->` is rejected as a malformed timing line.
pub fn parse_vtt(doc_id: &str, raw: &str) -> Result<Transcript, IngestError> {
    let raw = raw.strip_prefix('\u{feff}').unwrap_or(raw);
    let lines: Vec<&str> = raw.lines().collect();
    match lines.first() {
        Some(l) if l.trim_end().starts_with("WEBVTT") => {}
        _ => return Err(IngestError::MalformedHeader { line: 1 }),
    }

    let mut cues = Vec::new();
    let mut dropped_notes = 0usize;
    let mut i = 1usize; // past the signature line

    while i < lines.len() {
        if lines[i].trim().is_empty() {
            i += 1;
            continue;
        }
        // collect one block
        let start = i;
        while i < lines.len() && !lines[i].trim().is_empty() {
            i += 1;
        }
        let block = &lines[start..i];

        let head = block[0].trim_start();
        if head.starts_with("NOTE") || head.starts_with("STYLE") || head.starts_with("REGION") {
            dropped_notes += 1;
            continue;
        }

        match block.iter().position(|l| l.contains("-->")) {
            Some(t) => {
                let timing = block[t];
                let line_no = start + t + 1;
                let (from, rest) = timing.split_once("-->").unwrap();
                let to = rest.trim().split_whitespace().next().unwrap_or("");
                let start_ms = parse_timestamp(from.trim());
                let end_ms = parse_timestamp(to);
                let (start_ms, end_ms) = match (start_ms, end_ms) {
                    (Some(a), Some(b)) if a <= b => (a, b),
                    _ => {
                        return Err(IngestError::MalformedTimestamp {
                            line: line_no,
                            text: timing.trim().to_string(),
                        })
                    }
                };
                let text = block[t + 1..]
                    .iter()
                    .map(|l| strip_tags(l))
                    .map(|l| l.trim().to_string())
                    .filter(|l| !l.is_empty())
                    .collect::<Vec<_>>()
                    .join(" ");
                cues.push(VttCue { start_ms, end_ms, text });
            }
            None => {
                if let Some(bad) = block.iter().position(|l| timestampish(l.trim())) {
                    return Err(IngestError::MalformedTimestamp {
                        line: start + bad + 1,
                        text: block[bad].trim().to_string(),
                    });
                }
                // settings/metadata lines (duration, recognizability, ...)
                dropped_notes += block.len();
            }
        }
    }

    let full_text = cues
        .iter()
        .map(|c| c.text.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    Ok(Transcript {
        doc_id: doc_id.to_string(),
        cues,
        full_text,
        dropped_notes,
    })
}

impl Transcript {
    /// Serializes the cues back to WebVTT (dropped metadata is gone for good).
    pub fn to_vtt(&self) -> String {
        let mut out = String::from("WEBVTT\n\n");
        for cue in &self.cues {
            out.push_str(&format_timestamp(cue.start_ms));
            out.push_str(" --> ");
            out.push_str(&format_timestamp(cue.end_ms));
            out.push('\n');
            out.push_str(&cue.text);
            out.push_str("\n\n");
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VideoCategory {
    Vlog,
    NonVlog,
    Deleted,
}

impl VideoCategory {
    fn parse(s: &str) -> Option<Self> {
        match s.trim().to_lowercase().as_str() {
            "vlog" => Some(Self::Vlog),
            "non-vlog" => Some(Self::NonVlog),
            "deleted" => Some(Self::Deleted),
            _ => None,
        }
    }
}

impl fmt::Display for VideoCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Vlog => "vlog",
            Self::NonVlog => "non-vlog",
            Self::Deleted => "deleted",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub doc_id: String,
    pub category: VideoCategory,
    pub channel: String,
    pub url: String,
    pub description: String,
}

/// The annotation manifest: one row per downloaded video.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
}

impl CorpusManifest {
    pub fn load(path: &Path) -> Result<Self, IngestError> {
        let raw = fs::read(path).map_err(|source| IngestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let raw = String::from_utf8(raw).map_err(|_| IngestError::InvalidUtf8 {
            path: path.display().to_string(),
        })?;
        Self::parse(&raw)
    }

    pub fn parse(raw: &str) -> Result<Self, IngestError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(raw.as_bytes());
        let mut entries: Vec<ManifestEntry> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (idx, record) in reader.records().enumerate() {
            let record = record?;
            let row = idx + 2; // header is row 1
            let field = |i: usize| record.get(i).unwrap_or("").to_string();
            let doc_id = field(0);
            if !seen.insert(doc_id.clone()) {
                return Err(IngestError::DuplicateDocId(doc_id));
            }
            let raw_cat = field(1);
            let category = VideoCategory::parse(&raw_cat).ok_or(IngestError::UnknownCategory {
                row,
                value: raw_cat,
            })?;
            entries.push(ManifestEntry {
                doc_id,
                category,
                channel: field(2),
                url: field(3),
                description: field(4),
            });
        }
        Ok(Self { entries })
    }

    pub fn category_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for e in &self.entries {
            *counts.entry(e.category.to_string()).or_insert(0) += 1;
        }
        counts
    }
}

/// The working corpus: parsed transcripts restricted to one manifest category.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub documents: Vec<Transcript>,
    pub manifest: CorpusManifest,
    pub filter_applied: VideoCategory,
}

/// Summary of a corpus build, emitted as the ingest report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub category_counts: BTreeMap<String, usize>,
    pub documents_kept: usize,
    pub total_cues: usize,
    pub total_dropped_notes: usize,
}

/// Parses every kept-category transcript under `dir`, ordered by `doc_id`.
///
/// Files are matched to manifest rows by their suffix-stripped filename stem.
pub fn build_corpus(
    dir: &Path,
    manifest: CorpusManifest,
    keep: VideoCategory,
) -> Result<Corpus, IngestError> {
    let mut files: BTreeMap<String, std::path::PathBuf> = BTreeMap::new();
    let entries = fs::read_dir(dir).map_err(|source| IngestError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    for entry in entries {
        let entry = entry.map_err(|source| IngestError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        let name = entry.file_name().to_string_lossy().to_string();
        if name.ends_with(".vtt") {
            files.insert(strip_caption_suffix(&name), entry.path());
        }
    }

    let mut kept: Vec<&ManifestEntry> = manifest
        .entries
        .iter()
        .filter(|e| e.category == keep)
        .collect();
    kept.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));

    let mut documents = Vec::with_capacity(kept.len());
    for entry in kept {
        let path = files
            .get(&entry.doc_id)
            .ok_or_else(|| IngestError::MissingFile(entry.doc_id.clone()))?;
        let raw = fs::read(path).map_err(|source| IngestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let raw = String::from_utf8(raw).map_err(|_| IngestError::InvalidUtf8 {
            path: path.display().to_string(),
        })?;
        documents.push(parse_vtt(&entry.doc_id, &raw)?);
    }

    Ok(Corpus {
        documents,
        manifest,
        filter_applied: keep,
    })
}

impl Corpus {
    pub fn summary(&self) -> CorpusSummary {
        CorpusSummary {
            category_counts: self.manifest.category_counts(),
            documents_kept: self.documents.len(),
            total_cues: self.documents.iter().map(|d| d.cues.len()).sum(),
            total_dropped_notes: self.documents.iter().map(|d| d.dropped_notes).sum(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_marker_with_underscore() {
        assert_eq!(strip_caption_suffix("myStory_Autogenerated Caption.vtt"), "myStory");
    }

    #[test]
    fn strips_marker_with_space() {
        assert_eq!(strip_caption_suffix("myStory Autogenerated Caption.vtt"), "myStory");
    }

    #[test]
    fn strips_extension_without_marker() {
        assert_eq!(strip_caption_suffix("myStory.vtt"), "myStory");
    }

    #[test]
    fn strips_exactly_one_trailing_marker() {
        assert_eq!(
            strip_caption_suffix("a_Autogenerated Caption_Autogenerated Caption.vtt"),
            "a_Autogenerated Caption"
        );
    }

    #[test]
    fn single_cue() {
        let t = parse_vtt("d", "WEBVTT\n\n00:00:01.000 --> 00:00:03.500\nI got covid\n").unwrap();
        assert_eq!(
            t.cues,
            vec![VttCue { start_ms: 1000, end_ms: 3500, text: "I got covid".into() }]
        );
        assert_eq!(t.full_text, "I got covid");
        assert_eq!(t.dropped_notes, 0);
    }

    #[test]
    fn note_block_dropped_and_counted() {
        let raw = "WEBVTT\n\nNOTE duration:\"00:05:06\"\n\n00:00:01.000 --> 00:00:02.000\nhello\n";
        let t = parse_vtt("d", raw).unwrap();
        assert_eq!(t.dropped_notes, 1);
        assert_eq!(t.full_text, "hello");
    }

    #[test]
    fn metadata_settings_lines_counted() {
        let raw = "WEBVTT\n\nlanguage:en-us\nconfidence:0.92\n\n00:00:01.000 --> 00:00:02.000\nhi\n";
        let t = parse_vtt("d", raw).unwrap();
        assert_eq!(t.dropped_notes, 2);
        assert_eq!(t.full_text, "hi");
    }

    #[test]
    fn missing_arrow_is_malformed_timestamp() {
        let raw = "WEBVTT\n\n00:00:01.000 00:00:02.000\nhello\n";
        match parse_vtt("d", raw) {
            Err(IngestError::MalformedTimestamp { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected MalformedTimestamp, got {other:?}"),
        }
    }

    #[test]
    fn missing_signature_is_malformed_header() {
        assert!(matches!(
            parse_vtt("d", "00:00:01.000 --> 00:00:02.000\nhi\n"),
            Err(IngestError::MalformedHeader { line: 1 })
        ));
    }

    #[test]
    fn start_after_end_rejected() {
        let raw = "WEBVTT\n\n00:00:05.000 --> 00:00:02.000\nhello\n";
        assert!(matches!(parse_vtt("d", raw), Err(IngestError::MalformedTimestamp { .. })));
    }

    #[test]
    fn multi_line_payload_joined_with_space() {
        let raw = "WEBVTT\n\n00:00:01.000 --> 00:00:02.000\nfirst line\nsecond line\n";
        let t = parse_vtt("d", raw).unwrap();
        assert_eq!(t.cues[0].text, "first line second line");
    }

    #[test]
    fn styling_tags_stripped() {
        let raw = "WEBVTT\n\n00:00:01.000 --> 00:00:02.000\n<v Speaker>so <i>sick</i>\n";
        let t = parse_vtt("d", raw).unwrap();
        assert_eq!(t.cues[0].text, "so sick");
    }

    #[test]
    fn vtt_round_trip() {
        let raw = "WEBVTT\n\nNOTE x\n\n00:00:01.000 --> 00:00:03.500\nI got covid\n\n01:02:03.004 --> 01:02:04.005\nfever and cough\n";
        let t = parse_vtt("d", raw).unwrap();
        let again = parse_vtt("d", &t.to_vtt()).unwrap();
        assert_eq!(t.cues, again.cues);
        assert_eq!(t.full_text, again.full_text);
        assert_eq!(again.dropped_notes, 0);
    }

    #[test]
    fn manifest_parses_three_categories() {
        let raw = "doc_id,category,channel,url,description\n\
                   a,vlog,ch1,http://a,first\n\
                   b,Non-Vlog,ch2,http://b,second\n\
                   c,DELETED,ch3,http://c,third\n";
        let m = CorpusManifest::parse(raw).unwrap();
        assert_eq!(m.entries.len(), 3);
        assert_eq!(m.entries[1].category, VideoCategory::NonVlog);
    }

    #[test]
    fn manifest_rejects_unknown_category() {
        let raw = "doc_id,category,channel,url,description\na,interview,c,u,d\n";
        assert!(matches!(
            CorpusManifest::parse(raw),
            Err(IngestError::UnknownCategory { row: 2, .. })
        ));
    }

    #[test]
    fn manifest_rejects_duplicate_doc_id() {
        let raw = "doc_id,category,channel,url,description\na,vlog,c,u,d\na,vlog,c,u,d\n";
        assert!(matches!(CorpusManifest::parse(raw), Err(IngestError::DuplicateDocId(_))));
    }

    #[test]
    fn timestamp_without_hours() {
        assert_eq!(parse_timestamp("01:02.345"), Some(62_345));
        assert_eq!(parse_timestamp("00:00:01.000"), Some(1000));
        assert_eq!(parse_timestamp("garbage"), None);
    }
}
