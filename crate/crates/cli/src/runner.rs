//! Stage implementations and run-directory plumbing.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use vlogscreen::cloud::{layout_cloud, render_svg, CloudConfig};
use vlogscreen::ingest::{build_corpus, CorpusManifest, CorpusSummary, Transcript, VideoCategory};
use vlogscreen::lexicon::{corpus_report, match_document, Lexicon, LexiconReport};
use vlogscreen::ngram::tfidf;
use vlogscreen::textprep::{preprocess, token_histogram, PipelineMode};
use vlogscreen::topic::{
    build_bow, fit_lda, intertopic_map, saliency_ranking, sweep, top_words, IntertopicMap,
    LdaConfig, TopicError,
};
use vlogscreen::{ResourceBundle, TokenizedDoc};

use crate::config::RunConfig;
use crate::error::CliError;

pub const RESOURCE_DIR_ENV: &str = "VLOGSCREEN_RESOURCE_DIR";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub outputs: Vec<ArtifactRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub toolkit_version: String,
    pub config_hash: String,
    pub config: RunConfig,
    pub stages: Vec<StageRecord>,
}

fn write_text(run_dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = run_dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn write_json<T: Serialize>(run_dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let mut body = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Input(format!("cannot serialize {name}: {e}")))?;
    body.push('\n');
    write_text(run_dir, name, &body)
}

fn read_json<T: for<'de> Deserialize<'de>>(run_dir: &Path, name: &str) -> Result<T, CliError> {
    let path = run_dir.join(name);
    let raw = fs::read_to_string(&path).map_err(|_| CliError::MissingUpstream(name.to_string()))?;
    serde_json::from_str(&raw)
        .map_err(|e| CliError::Input(format!("corrupt artifact {}: {e}", path.display())))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn digest_outputs(paths: &[PathBuf], run_dir: &Path) -> Result<Vec<ArtifactRecord>, CliError> {
    paths
        .iter()
        .map(|path| {
            let bytes = fs::read(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            Ok(ArtifactRecord {
                path: path
                    .strip_prefix(run_dir)
                    .unwrap_or(path)
                    .display()
                    .to_string(),
                sha256: sha256_hex(&bytes),
            })
        })
        .collect()
}

/// Resource bundle and lexicon, honoring the env override and config paths.
pub fn load_resources(config: &RunConfig) -> Result<(ResourceBundle, Lexicon), CliError> {
    let env_dir = std::env::var_os(RESOURCE_DIR_ENV).map(PathBuf::from);
    let dir = env_dir.as_ref().or(config.resources.dir.as_ref());

    let bundle = match dir {
        Some(dir) => ResourceBundle::from_dir(dir)
            .map_err(|e| CliError::Input(format!("resource dir {}: {e}", dir.display())))?,
        None => ResourceBundle::builtin(),
    };

    let lexicon = if let Some(path) = &config.resources.lexicon {
        Lexicon::load(path).map_err(|e| CliError::Input(format!("lexicon: {e}")))?
    } else if let Some(dir) = dir {
        let candidate = dir.join("lexicon.tsv");
        if candidate.is_file() {
            Lexicon::load(&candidate).map_err(|e| CliError::Input(format!("lexicon: {e}")))?
        } else {
            Lexicon::builtin()
        }
    } else {
        Lexicon::builtin()
    };
    Ok((bundle, lexicon))
}

fn topic_error(e: TopicError) -> CliError {
    match e {
        TopicError::EmptyVocabulary => CliError::EmptyData(e.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

pub fn stage_ingest(config: &RunConfig, run_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let manifest = CorpusManifest::load(&config.manifest_path)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let corpus = build_corpus(&config.corpus_dir, manifest, VideoCategory::Vlog)
        .map_err(|e| CliError::Input(e.to_string()))?;
    if corpus.documents.is_empty() {
        return Err(CliError::EmptyData("empty corpus: no vlog transcripts".into()));
    }
    let summary: CorpusSummary = corpus.summary();
    Ok(vec![
        write_json(run_dir, "corpus_summary.json", &summary)?,
        write_json(run_dir, "corpus.json", &corpus.documents)?,
    ])
}

fn tokens_file(mode: PipelineMode) -> String {
    format!("tokens_{mode}.json")
}

pub fn stage_preprocess(config: &RunConfig, run_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let documents: Vec<Transcript> = read_json(run_dir, "corpus.json")?;
    let (resources, _) = load_resources(config)?;
    let mut outputs = Vec::new();
    for mode in config.mode.modes() {
        let docs: Vec<TokenizedDoc> = documents
            .iter()
            .map(|doc| preprocess(doc, mode, &resources))
            .collect();

        let histogram = token_histogram(&docs, config.histogram_bucket_width);
        let mut csv = String::from("bucket_start,doc_count\n");
        for (bucket, count) in &histogram {
            csv.push_str(&format!("{bucket},{count}\n"));
        }
        outputs.push(write_text(run_dir, &format!("histogram_{mode}.csv"), &csv)?);
        outputs.push(write_json(run_dir, &tokens_file(mode), &docs)?);
    }
    Ok(outputs)
}

fn load_tokens(run_dir: &Path, mode: PipelineMode) -> Result<Vec<TokenizedDoc>, CliError> {
    read_json(run_dir, &tokens_file(mode))
}

pub fn stage_lexicon(config: &RunConfig, run_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let (_, lexicon) = load_resources(config)?;
    // screening runs on basic-mode tokens when available
    let docs = load_tokens(run_dir, PipelineMode::Basic)
        .or_else(|_| load_tokens(run_dir, PipelineMode::Advanced))?;
    let profiles: Vec<_> = docs.iter().map(|d| match_document(d, &lexicon)).collect();
    let report: LexiconReport =
        corpus_report(&profiles).map_err(|e| CliError::EmptyData(e.to_string()))?;
    Ok(vec![write_json(run_dir, "lexicon_report.json", &report)?])
}

pub fn stage_ngrams(config: &RunConfig, run_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut outputs = Vec::new();
    for mode in config.mode.modes() {
        let docs = load_tokens(run_dir, mode)?;
        for &n in &config.orders {
            let table = tfidf(&docs, n).map_err(|e| CliError::EmptyData(e.to_string()))?;

            let mut csv = String::from("gram,weight,df\n");
            for row in &table.rows {
                csv.push_str(&format!("\"{}\",{},{}\n", row.gram, row.weight, row.df));
            }
            outputs.push(write_text(run_dir, &format!("ngrams_{mode}_{n}gram.csv"), &csv)?);

            let ranked: Vec<(String, f64)> = table
                .rows
                .iter()
                .map(|row| (row.gram.clone(), row.weight))
                .collect();
            let cloud_config = CloudConfig {
                width: config.cloud.width,
                height: config.cloud.height,
                font_min: config.cloud.font_min,
                font_max: config.cloud.font_max,
                seed: config.seed,
                max_words: config.cloud.max_words,
            };
            let layout = layout_cloud(&ranked, &cloud_config)
                .map_err(|e| CliError::Input(format!("cloud ({mode}, {n}-gram): {e}")))?;
            outputs.push(write_text(
                run_dir,
                &format!("cloud_{mode}_{n}gram.svg"),
                &render_svg(&layout),
            )?);
            outputs.push(write_json(
                run_dir,
                &format!("cloud_{mode}_{n}gram_skipped.json"),
                &layout.skipped,
            )?);
        }
    }
    Ok(outputs)
}

#[derive(Debug, Serialize, Deserialize)]
struct TopicSummary {
    topic: usize,
    marginal: f64,
    top_words: Vec<(String, f64)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TopicsArtifact {
    k: usize,
    seed: u64,
    topics: Vec<TopicSummary>,
    intertopic: IntertopicMap,
}

pub fn stage_topics(config: &RunConfig, run_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut outputs = Vec::new();
    for mode in config.mode.modes() {
        let docs = load_tokens(run_dir, mode)?;
        let bow =
            build_bow(&docs, config.lda.min_df, config.lda.max_df_fraction).map_err(topic_error)?;

        let base = LdaConfig {
            k: 1,
            alpha: 1.0,
            beta: 0.01,
            iterations: config.lda.iterations,
            burn_in: config.lda.burn_in,
            seed: config.seed,
        };
        let rows = sweep(&bow, &config.lda.k_list, &base, config.lda.top_words)
            .map_err(topic_error)?;
        let mut csv = String::from("k,coherence,log_perplexity,perplexity\n");
        for row in &rows {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                row.k, row.coherence, row.log_perplexity, row.perplexity
            ));
        }
        outputs.push(write_text(run_dir, &format!("sweep_{mode}.csv"), &csv)?);

        for &k in &config.lda.k_list {
            // same per-K config the sweep used, so the artifacts match its scores
            let lda_config = LdaConfig {
                k,
                alpha: 50.0 / k as f64,
                seed: config.seed + k as u64,
                ..base.clone()
            };
            let model = fit_lda(&bow, &lda_config).map_err(topic_error)?;
            let marginals = model.topic_marginals();
            let topics = (0..k)
                .map(|topic| TopicSummary {
                    topic,
                    marginal: marginals[topic],
                    top_words: top_words(&model, topic, config.lda.top_words, &bow),
                })
                .collect();
            let artifact = TopicsArtifact {
                k,
                seed: lda_config.seed,
                topics,
                intertopic: intertopic_map(&model),
            };
            outputs.push(write_json(run_dir, &format!("topics_{mode}_K{k}.json"), &artifact)?);

            let mut csv = String::from("term,saliency\n");
            for (term, score) in saliency_ranking(&model, &bow, config.lda.saliency_terms) {
                csv.push_str(&format!("\"{term}\",{score}\n"));
            }
            outputs.push(write_text(run_dir, &format!("saliency_{mode}_K{k}.csv"), &csv)?);
        }
    }
    Ok(outputs)
}

const STAGE_ORDER: [(&str, fn(&RunConfig, &Path) -> Result<Vec<PathBuf>, CliError>); 5] = [
    ("ingest", stage_ingest),
    ("preprocess", stage_preprocess),
    ("lexicon", stage_lexicon),
    ("ngrams", stage_ngrams),
    ("topics", stage_topics),
];

pub fn run_stage(name: &str, config: &RunConfig, run_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(run_dir)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", run_dir.display())))?;
    let stage = STAGE_ORDER
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| CliError::Usage(format!("unknown stage {name:?}")))?;
    stage.1(config, run_dir)
}

pub fn make_run_id(config_hash: &str) -> String {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("{now}-{}", &config_hash[..12])
}

/// Executes all stages into `output_dir/run_id`. On a stage failure the
/// manifest still records the stages that completed.
pub fn cmd_run(config: &RunConfig) -> Result<(PathBuf, RunManifest), CliError> {
    let config_hash = config.hash();
    let run_id = make_run_id(&config_hash);
    let run_dir = config.output_dir.join(&run_id);
    fs::create_dir_all(&run_dir)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", run_dir.display())))?;

    let mut manifest = RunManifest {
        run_id,
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash,
        config: config.clone(),
        stages: Vec::new(),
    };

    for (name, stage) in STAGE_ORDER {
        match stage(config, &run_dir) {
            Ok(paths) => manifest.stages.push(StageRecord {
                stage: name.to_string(),
                outputs: digest_outputs(&paths, &run_dir)?,
            }),
            Err(e) => {
                write_json(&run_dir, "run_manifest.json", &manifest)?;
                return Err(e);
            }
        }
    }
    write_json(&run_dir, "run_manifest.json", &manifest)?;
    Ok((run_dir, manifest))
}

/// Human-readable digest of a completed run.
pub fn cmd_report(run_dir: &Path) -> Result<String, CliError> {
    let manifest: RunManifest = read_json(run_dir, "run_manifest.json")?;
    let mut out = String::new();
    out.push_str(&format!("run {}\n", manifest.run_id));
    out.push_str(&format!("toolkit {}\n", manifest.toolkit_version));
    out.push_str(&format!("config hash {}\n", manifest.config_hash));
    for stage in &manifest.stages {
        out.push_str(&format!("stage {} ({} artifacts)\n", stage.stage, stage.outputs.len()));
        for artifact in &stage.outputs {
            out.push_str(&format!("  {}  {}\n", &artifact.sha256[..12], artifact.path));
        }
    }
    Ok(out)
}
