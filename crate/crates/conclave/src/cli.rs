//! Command-line interface: every pipeline as a reproducible, config-driven
//! run. stdout carries only the requested artifact; diagnostics go to
//! stderr; failures exit nonzero with a JSON error envelope on stderr.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use conclave_core::ach::{parse_ach_report, parse_decision_output, PROTOCOL_REFERENCE};
use conclave_core::rewards::{anneal_probability, ScoreOptions, Stage};
use conclave_core::social_choice::{Profile, VotingRule};

use crate::agents::BackendSpec;
use crate::benchmark::{load_dataset, render_scaling_csv, scaling_table};
use crate::config::{load_config, EmbedderConfig};
use crate::embedding::build_embedder;
use crate::orchestrator::EpisodeContext;
use crate::rollout::{parse_transcript, records_to_jsonl, score_transcript};
use crate::runner::{
    execute_run, live_request_estimate, write_file, write_manifest, write_run_artifacts,
    EngineError,
};

#[derive(Parser)]
#[command(name = "conclave", version, about = "Collaborative decision engine for multi-agent MCQA runs")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct LiveGuard {
    /// Confirm spending live API requests.
    #[arg(long)]
    yes: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured strategy over the dataset and print the
    /// accuracy table.
    Eval {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Parallel episodes (default: available cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        guard: LiveGuard,
    },
    /// Apply a voting rule to a profile file and print the winner.
    Vote {
        #[arg(long)]
        rule: String,
        #[arg(long)]
        profile: PathBuf,
        /// Print the full result (tally, tie-break flag, trace) as JSON.
        #[arg(long)]
        details: bool,
    },
    /// Parse a think block (or a full tagged response) into a structured
    /// report, printed as JSON.
    AchParse {
        #[arg(long)]
        input: PathBuf,
    },
    /// Score a rollout transcript JSONL and emit scored records.
    Score {
        #[arg(long)]
        input: PathBuf,
        /// stage1 (pattern reward) or stage2 (soft embedding reward).
        #[arg(long)]
        stage: String,
        /// Protocol reference text for stage2 (default: built-in script).
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Embedding provider: hash64 (default) or http.
        #[arg(long, default_value = "hash64")]
        embedder: String,
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        auth_env: Option<String>,
        /// Write records here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the curriculum schedule at the given steps as CSV
    /// (step,p_full,p_simple).
    Anneal {
        #[arg(long)]
        total: u64,
        /// Comma-separated step list, e.g. 0,50,100.
        #[arg(long)]
        steps: String,
    },
    /// Agent-count scaling sweep; prints count,accuracy CSV.
    Scale {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated executor counts, e.g. 1,3,5.
        #[arg(long)]
        counts: String,
        /// Output directory for the CSV and manifest.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        guard: LiveGuard,
    },
}

fn invalid(kind: &'static str, reason: impl ToString) -> EngineError {
    EngineError::Invalid { kind, reason: reason.to_string() }
}

fn default_jobs(flag: Option<usize>) -> usize {
    flag.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn parse_list<T: std::str::FromStr>(text: &str, kind: &'static str) -> Result<Vec<T>, EngineError>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| invalid(kind, format!("{s:?}: {e}"))))
        .collect()
}

/// Ensure auth env vars exist and the user consented before any live run.
fn live_guard(
    config: &crate::config::RunConfig,
    item_count: usize,
    yes: bool,
) -> Result<(), EngineError> {
    let Some(projected) = live_request_estimate(config, item_count) else {
        return Ok(());
    };
    for spec in config.executors.iter().chain(config.decider.iter()) {
        if let BackendSpec::Http { auth_env, .. } = &spec.backend {
            if std::env::var(auth_env).is_err() {
                return Err(invalid(
                    "live_guard",
                    format!("agent {} needs env var {auth_env} set", spec.id),
                ));
            }
        }
    }
    eprintln!("projected live requests: up to {projected}");
    if !yes {
        return Err(EngineError::LiveRunRefused { projected });
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), EngineError> {
    match cli.command {
        Command::Eval { config: config_path, out, jobs, guard } => {
            let config = load_config(&config_path)?;
            let config_bytes = std::fs::read(&config_path).map_err(|source| EngineError::Io {
                context: format!("reading {}", config_path.display()),
                source,
            })?;
            let out_dir = out
                .or_else(|| config.output_dir.clone())
                .ok_or_else(|| invalid("usage", "eval needs --out or output_dir in the config"))?;
            let item_count = load_dataset(&config.dataset)?.len();
            live_guard(&config, item_count, guard.yes)?;

            let jobs = config.parallelism.unwrap_or_else(|| default_jobs(jobs));
            let output = execute_run(&config, jobs)?;
            write_run_artifacts(&out_dir, "eval", &config_bytes, &config, &output)?;
            match &output.table {
                Some(table) => print!("{table}"),
                None => eprintln!(
                    "no single_agent strategy configured; records written without a report table"
                ),
            }
            Ok(())
        }
        Command::Vote { rule, profile, details } => {
            let rule: VotingRule = rule.parse().map_err(|e| invalid("rule", e))?;
            let text = std::fs::read_to_string(&profile).map_err(|source| EngineError::Io {
                context: format!("reading {}", profile.display()),
                source,
            })?;
            let profile: Profile =
                serde_json::from_str(&text).map_err(|e| invalid("profile", e))?;
            let result = rule.apply(&profile).map_err(|e| invalid("vote", e))?;
            if details {
                println!("{}", serde_json::to_string_pretty(&result).expect("serializes"));
            } else {
                println!("{}", result.winner);
            }
            Ok(())
        }
        Command::AchParse { input } => {
            let text = std::fs::read_to_string(&input).map_err(|source| EngineError::Io {
                context: format!("reading {}", input.display()),
                source,
            })?;
            // Accept either a bare think block or a full tagged response.
            let think = match parse_decision_output(&text) {
                Ok(output) => output.think,
                Err(_) => text,
            };
            let report = parse_ach_report(&think).map_err(|e| invalid("ach_parse", e))?;
            println!("{}", serde_json::to_string_pretty(&report).expect("serializes"));
            Ok(())
        }
        Command::Score { input, stage, reference, embedder, endpoint, model, auth_env, out } => {
            let stage = match stage.to_lowercase().as_str() {
                "stage1" | "1" => Stage::Stage1,
                "stage2" | "2" => Stage::Stage2,
                other => return Err(invalid("stage", format!("unknown stage {other:?}"))),
            };
            let text = std::fs::read_to_string(&input).map_err(|source| EngineError::Io {
                context: format!("reading {}", input.display()),
                source,
            })?;
            let entries = parse_transcript(&text)?;
            let reference_text = match &reference {
                Some(path) => std::fs::read_to_string(path).map_err(|source| EngineError::Io {
                    context: format!("reading {}", path.display()),
                    source,
                })?,
                None => PROTOCOL_REFERENCE.to_string(),
            };
            let embedder_config = match embedder.as_str() {
                "hash64" => EmbedderConfig::Hash64,
                "http" => EmbedderConfig::Http {
                    endpoint: endpoint
                        .ok_or_else(|| invalid("embedder", "--endpoint required for http"))?,
                    model: model.ok_or_else(|| invalid("embedder", "--model required for http"))?,
                    auth_env: auth_env
                        .ok_or_else(|| invalid("embedder", "--auth-env required for http"))?,
                    timeout_secs: 30,
                },
                other => return Err(invalid("embedder", format!("unknown provider {other:?}"))),
            };
            let embedder = build_embedder(&embedder_config);
            let records = score_transcript(
                entries,
                stage,
                &ScoreOptions::default(),
                &reference_text,
                embedder.as_ref(),
            )?;
            let jsonl = records_to_jsonl(&records);
            match out {
                Some(path) => write_file(&path, &jsonl)?,
                None => print!("{jsonl}"),
            }
            Ok(())
        }
        Command::Anneal { total, steps } => {
            let steps: Vec<u64> = parse_list(&steps, "steps")?;
            for step in steps {
                let state = anneal_probability(step, total).map_err(|e| invalid("anneal", e))?;
                println!("{},{:?},{:?}", state.step, state.p_full, state.p_simple);
            }
            Ok(())
        }
        Command::Scale { config: config_path, counts, out, jobs, guard } => {
            let config = load_config(&config_path)?;
            let config_bytes = std::fs::read(&config_path).map_err(|source| EngineError::Io {
                context: format!("reading {}", config_path.display()),
                source,
            })?;
            let counts: Vec<usize> = parse_list(&counts, "counts")?;
            if counts.is_empty() || counts.contains(&0) {
                return Err(invalid("counts", "executor counts must be positive"));
            }
            let items = load_dataset(&config.dataset)?;
            live_guard(&config, items.len() * counts.len(), guard.yes)?;

            let mut specs = config.executors.clone();
            if let Some(decider) = &config.decider {
                specs.push(decider.clone());
            }
            let pool = crate::agents::AgentPool::load(specs)?;
            let templates = config.load_templates()?;
            let executor_ids: Vec<String> =
                config.executors.iter().map(|e| e.id.clone()).collect();
            let strategy = config
                .strategies
                .first()
                .ok_or_else(|| invalid("usage", "scale needs a strategy in the config"))?;
            let _ = default_jobs(jobs);
            let ctx = EpisodeContext {
                pool: &pool,
                executor_ids: &executor_ids,
                strategy,
                pool_k: config.pool_k,
                pool_seed: config.seeds().pool,
                candidate_selection: config.candidate_selection,
                templates: &templates,
                scoring: None,
            };
            let rows = scaling_table(&items, &counts, &ctx)?;
            let csv = render_scaling_csv(&rows);
            if let Some(dir) = out.or_else(|| config.output_dir.clone()) {
                std::fs::create_dir_all(&dir).map_err(|source| EngineError::Io {
                    context: format!("creating {}", dir.display()),
                    source,
                })?;
                write_file(&dir.join("scaling.csv"), &csv)?;
                write_manifest(&dir, "scale", &config_bytes, &config)?;
            }
            print!("{csv}");
            Ok(())
        }
    }
}
