//! Run configuration: TOML file + flag overrides, validation, and the
//! canonical config hash used in run ids.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use vlogscreen::textprep::PipelineMode;

/// Which preprocessing pipelines a run covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeChoice {
    Basic,
    Advanced,
    Both,
}

impl ModeChoice {
    pub fn modes(self) -> Vec<PipelineMode> {
        match self {
            ModeChoice::Basic => vec![PipelineMode::Basic],
            ModeChoice::Advanced => vec![PipelineMode::Advanced],
            ModeChoice::Both => vec![PipelineMode::Basic, PipelineMode::Advanced],
        }
    }
}

impl fmt::Display for ModeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModeChoice::Basic => "basic",
            ModeChoice::Advanced => "advanced",
            ModeChoice::Both => "both",
        };
        f.write_str(s)
    }
}

fn default_orders() -> Vec<usize> {
    vec![1, 2]
}

fn default_bucket_width() -> usize {
    100
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LdaSection {
    pub k_list: Vec<usize>,
    pub iterations: usize,
    pub burn_in: usize,
    pub min_df: usize,
    pub max_df_fraction: f64,
    pub top_words: usize,
    pub saliency_terms: usize,
}

impl Default for LdaSection {
    fn default() -> Self {
        Self {
            k_list: vec![5, 10, 15, 20],
            iterations: 500,
            burn_in: 100,
            min_df: 1,
            max_df_fraction: 1.0,
            top_words: 10,
            saliency_terms: 30,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CloudSection {
    pub width: u32,
    pub height: u32,
    pub font_min: f64,
    pub font_max: f64,
    pub max_words: usize,
}

impl Default for CloudSection {
    fn default() -> Self {
        Self {
            width: 800,
            height: 600,
            font_min: 12.0,
            font_max: 96.0,
            max_words: 100,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResourceSection {
    /// Directory holding the standard resource file names; built-in bundle
    /// when unset. Overridden by `VLOGSCREEN_RESOURCE_DIR`.
    pub dir: Option<PathBuf>,
    /// Lexicon TSV; built-in lexicon when unset.
    pub lexicon: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub corpus_dir: PathBuf,
    pub manifest_path: PathBuf,
    pub output_dir: PathBuf,
    pub mode: ModeChoice,
    pub orders: Vec<usize>,
    pub seed: u64,
    pub histogram_bucket_width: usize,
    pub resources: ResourceSection,
    pub lda: LdaSection,
    pub cloud: CloudSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            corpus_dir: PathBuf::from("corpus"),
            manifest_path: PathBuf::from("manifest.csv"),
            output_dir: PathBuf::from("runs"),
            mode: ModeChoice::Both,
            orders: default_orders(),
            seed: 42,
            histogram_bucket_width: default_bucket_width(),
            resources: ResourceSection::default(),
            lda: LdaSection::default(),
            cloud: CloudSection::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let raw = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&raw)
            .map_err(|e| CliError::Input(format!("bad config {}: {e}", path.display())))
    }

    /// Applies flag overrides (flags > file > defaults).
    pub fn apply_overrides(
        &mut self,
        mode: Option<ModeChoice>,
        seed: Option<u64>,
        out: Option<PathBuf>,
    ) {
        if let Some(mode) = mode {
            self.mode = mode;
        }
        if let Some(seed) = seed {
            self.seed = seed;
        }
        if let Some(out) = out {
            self.output_dir = out;
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.orders.is_empty() || self.orders.iter().any(|&n| !(1..=5).contains(&n)) {
            return Err(CliError::Usage(format!(
                "orders must be a non-empty subset of 1..=5, got {:?}",
                self.orders
            )));
        }
        if self.lda.k_list.is_empty() || self.lda.k_list.contains(&0) {
            return Err(CliError::Usage("lda.k_list must list K values >= 1".into()));
        }
        if self.lda.iterations <= self.lda.burn_in {
            return Err(CliError::Usage(
                "lda.iterations must exceed lda.burn_in".into(),
            ));
        }
        if !self.corpus_dir.is_dir() {
            return Err(CliError::Input(format!(
                "corpus_dir {} is not a directory",
                self.corpus_dir.display()
            )));
        }
        if !self.manifest_path.is_file() {
            return Err(CliError::Input(format!(
                "manifest {} not found",
                self.manifest_path.display()
            )));
        }
        for path in [&self.resources.dir, &self.resources.lexicon]
            .into_iter()
            .flatten()
        {
            if !path.exists() {
                return Err(CliError::Input(format!(
                    "resource path {} not found",
                    path.display()
                )));
            }
        }
        Ok(())
    }

    /// Hash of the canonical serialization; independent of key order in the
    /// source TOML because it is computed from the parsed struct.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
