//! Run driver shared by the CLI and the test suites: executes every
//! configured strategy over the dataset, folds the records into a report,
//! and writes the run artifacts with a reproducibility manifest.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde_json::json;
use thiserror::Error;

use conclave_core::ach::PROTOCOL_REFERENCE;
use conclave_core::hash::fnv1a64_hex;
use conclave_core::rewards::Embedder;

use crate::agents::{AgentError, AgentPool, BackendSpec};
use crate::benchmark::{
    evaluate_run, load_dataset, records_to_jsonl, render_table, AccuracyReport, DatasetError,
    McqaItem, ReportError, ReportMetadata,
};
use crate::config::{ConfigError, RunConfig};
use crate::embedding::build_embedder;
use crate::orchestrator::{run_episode, DecisionRecord, EpisodeContext, EpisodeError,
    ScoringContext};
use crate::rollout::TranscriptError;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Episode(#[from] EpisodeError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Transcript(#[from] TranscriptError),
    #[error("refusing to issue up to {projected} live requests without --yes")]
    LiveRunRefused { projected: usize },
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{reason}")]
    Invalid { kind: &'static str, reason: String },
}

impl EngineError {
    /// Short machine-readable kind for the error JSON envelope.
    pub fn kind(&self) -> &'static str {
        match self {
            EngineError::Config(_) => "config",
            EngineError::Dataset(_) => "dataset",
            EngineError::Agent(_) => "agent",
            EngineError::Episode(_) => "episode",
            EngineError::Report(_) => "report",
            EngineError::Transcript(_) => "transcript",
            EngineError::LiveRunRefused { .. } => "live_guard",
            EngineError::Io { .. } => "io",
            EngineError::Invalid { kind, .. } => kind,
        }
    }
}

pub(crate) fn write_file(path: &Path, content: &str) -> Result<(), EngineError> {
    std::fs::write(path, content).map_err(|source| EngineError::Io {
        context: format!("writing {}", path.display()),
        source,
    })
}

/// Everything one eval run produces. The report and table need a
/// single-agent baseline strategy in the run; without one only the record
/// stream is produced.
pub struct RunOutput {
    pub items: Vec<McqaItem>,
    pub records: Vec<DecisionRecord>,
    pub report: Option<AccuracyReport>,
    pub table: Option<String>,
}

/// Number of live HTTP requests an eval run would issue, as an upper bound;
/// `None` when every backend is scripted.
pub fn live_request_estimate(config: &RunConfig, item_count: usize) -> Option<usize> {
    let live = config
        .executors
        .iter()
        .chain(config.decider.iter())
        .any(|spec| matches!(spec.backend, BackendSpec::Http { .. }));
    live.then(|| {
        let per_item = config.pool_k.unwrap_or(config.executors.len()) + 1;
        item_count * config.strategies.len() * per_item
    })
}

/// Execute every configured strategy over the dataset. Items run in
/// parallel up to `jobs` workers; records come back in (strategy, item)
/// order regardless of scheduling.
pub fn execute_run(config: &RunConfig, jobs: usize) -> Result<RunOutput, EngineError> {
    let items = load_dataset(&config.dataset)?;
    let mut specs = config.executors.clone();
    if let Some(decider) = &config.decider {
        specs.push(decider.clone());
    }
    let pool = AgentPool::load(specs)?;
    let templates = config.load_templates()?;
    let executor_ids: Vec<String> = config.executors.iter().map(|e| e.id.clone()).collect();

    let embedder: Option<Box<dyn Embedder + Send + Sync>> =
        config.rewards.as_ref().map(|r| build_embedder(&r.embedder));
    let scoring: Option<ScoringContext> = config.rewards.as_ref().map(|r| ScoringContext {
        stage: r.stage,
        options: conclave_core::rewards::ScoreOptions { weights: r.weights, ach_mode: r.ach_mode },
        protocol_reference: PROTOCOL_REFERENCE,
        embedder: embedder.as_deref().expect("embedder built alongside rewards"),
    });

    let mut records: Vec<DecisionRecord> = Vec::with_capacity(items.len() * config.strategies.len());
    for strategy in &config.strategies {
        let ctx = EpisodeContext {
            pool: &pool,
            executor_ids: &executor_ids,
            strategy,
            pool_k: config.pool_k,
            pool_seed: config.seeds().pool,
            candidate_selection: config.candidate_selection,
            templates: &templates,
            scoring: scoring.as_ref(),
        };
        records.extend(run_items(&items, &ctx, jobs)?);
    }

    let baseline: Option<Vec<DecisionRecord>> =
        config.strategies.iter().find(|s| s.is_single_agent()).map(|strategy| {
            let name = strategy.display_name();
            records
                .iter()
                .filter(|r| r.strategy.display_name() == name)
                .cloned()
                .collect()
        });

    let (report, table) = match baseline {
        Some(baseline) => {
            let dataset_name = config
                .dataset
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".to_string());
            let metadata = ReportMetadata {
                pool: pool_description(config),
                seeds: config.seeds(),
                unix_time: std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
            };
            let report = evaluate_run(&dataset_name, &items, &records, &baseline, metadata)?;
            let table = render_table(&report);
            (Some(report), Some(table))
        }
        None => (None, None),
    };
    Ok(RunOutput { items, records, report, table })
}

fn pool_description(config: &RunConfig) -> String {
    let mut description = format!("{} executors", config.executors.len());
    if let Some(k) = config.pool_k {
        description.push_str(&format!(", {k} sampled per item"));
    }
    if let Some(decider) = &config.decider {
        description.push_str(&format!(", decider {}", decider.id));
    }
    description
}

/// Worker pool over items: an atomic cursor hands out indices, results are
/// reassembled in item order.
fn run_items(
    items: &[McqaItem],
    ctx: &EpisodeContext,
    jobs: usize,
) -> Result<Vec<DecisionRecord>, EngineError> {
    let jobs = jobs.max(1).min(items.len().max(1));
    let cursor = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<DecisionRecord, EpisodeError>>>> =
        Mutex::new((0..items.len()).map(|_| None).collect());

    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let index = cursor.fetch_add(1, Ordering::Relaxed);
                if index >= items.len() {
                    break;
                }
                let result = run_episode(&items[index], ctx);
                results.lock().expect("results lock")[index] = Some(result);
            });
        }
    });

    results
        .into_inner()
        .expect("results lock")
        .into_iter()
        .map(|slot| slot.expect("all items processed").map_err(EngineError::from))
        .collect()
}

/// Write decisions.jsonl, report.json, table.txt and manifest.json into the
/// output directory.
pub fn write_run_artifacts(
    out_dir: &Path,
    command: &str,
    config_bytes: &[u8],
    config: &RunConfig,
    output: &RunOutput,
) -> Result<(), EngineError> {
    std::fs::create_dir_all(out_dir).map_err(|source| EngineError::Io {
        context: format!("creating {}", out_dir.display()),
        source,
    })?;
    write_file(&out_dir.join("decisions.jsonl"), &records_to_jsonl(&output.records))?;
    if let Some(report) = &output.report {
        write_file(
            &out_dir.join("report.json"),
            &serde_json::to_string_pretty(report).expect("report serializes"),
        )?;
    }
    if let Some(table) = &output.table {
        write_file(&out_dir.join("table.txt"), table)?;
    }
    write_manifest(out_dir, command, config_bytes, config)
}

/// The manifest pins everything needed to reproduce a run bit-identically
/// with scripted backends: config hash, seeds, engine version.
pub fn write_manifest(
    out_dir: &Path,
    command: &str,
    config_bytes: &[u8],
    config: &RunConfig,
) -> Result<(), EngineError> {
    let config_text = String::from_utf8_lossy(config_bytes);
    let manifest = json!({
        "command": command,
        "config_hash": fnv1a64_hex(&config_text),
        "engine_version": env!("CARGO_PKG_VERSION"),
        "seeds": config.seeds(),
        "dataset": config.dataset.display().to_string(),
    });
    write_file(
        &out_dir.join("manifest.json"),
        &(serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n"),
    )
}
