//! Two-phase pipeline: executors answer the query independently, then the
//! configured strategy resolves their candidate answers into one decision.
//!
//! The execution phase gives every executor an identical question prompt
//! (with a ranking request appended for voting strategies) and assembles the
//! replies into a [`History`] in executor order. The decision phase turns
//! the history into a [`DecisionRecord`] via a named executor's own answer,
//! a voting rule over extracted ballots, an unstructured dictatorial
//! decider, or the structured-protocol decider with report parsing and
//! audit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use conclave_core::ach::{
    parse_ach_report, parse_decision_output, render_template, validate_report, AchReport,
    PromptVariant, FULL_ACH_TEMPLATE, SIMPLIFIED_ACH_TEMPLATE, UNSTRUCTURED_TEMPLATE,
};
use conclave_core::extract::{extract_choice, extract_ranking};
use conclave_core::hash::fnv1a64;
use conclave_core::rewards::{
    stage1_score_with, stage2_score_with, Embedder, RewardBreakdown, ScoreOptions, Stage,
};
use conclave_core::rng::SplitMix64;
use conclave_core::social_choice::{Ballot, Candidate, Profile, VoteResult, VotingRule};

use crate::agents::{sample_pool, Agent, AgentError, AgentPool, AgentResponse, SamplingParams};
use crate::benchmark::McqaItem;

/// Decision-phase input: the query plus the executors' candidate answers in
/// executor order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub query: String,
    pub responses: Vec<AgentResponse>,
}

/// How the decision phase resolves a history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Strategy {
    SingleAgent { agent: String },
    InformedDictatorial { decider: String },
    Voting { rule: VotingRule },
    AchDecision { decider: String, variant: PromptVariant },
}

impl Strategy {
    /// Stable row label for reports and tables.
    pub fn display_name(&self) -> String {
        match self {
            Strategy::SingleAgent { agent } => format!("Single Agent [{agent}]"),
            Strategy::InformedDictatorial { decider } => {
                format!("Informed Dictatorial [{decider}]")
            }
            Strategy::Voting { rule } => format!("Voting [{rule}]"),
            Strategy::AchDecision { decider, variant } => format!("ACH [{decider}, {variant}]"),
        }
    }

    /// Voting strategies elicit rankings during the execution phase.
    pub fn elicits_ranking(&self) -> bool {
        matches!(self, Strategy::Voting { .. })
    }

    pub fn decider_id(&self) -> Option<&str> {
        match self {
            Strategy::InformedDictatorial { decider } | Strategy::AchDecision { decider, .. } => {
                Some(decider)
            }
            _ => None,
        }
    }

    pub fn is_single_agent(&self) -> bool {
        matches!(self, Strategy::SingleAgent { .. })
    }
}

/// Outcome of one episode: what was decided, from what history, and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub item_id: String,
    pub strategy: Strategy,
    pub history: History,
    pub final_label: Option<String>,
    pub correct: bool,
    pub ach_report: Option<AchReport>,
    pub vote_result: Option<VoteResult>,
    pub breakdown: Option<RewardBreakdown>,
    pub trace: Vec<String>,
}

#[derive(Debug, Error)]
pub enum EpisodeError {
    #[error("all executors failed")]
    AllAgentsFailed,
    #[error("no executor produced a parseable ballot")]
    NoValidBallots,
    #[error("decider call failed: {0}")]
    DeciderFailed(#[source] AgentError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("strategy references agent {0:?} which is not in the history")]
    AgentNotInHistory(String),
    #[error("invalid ballot profile: {0}")]
    Profile(#[from] conclave_core::social_choice::ProfileError),
    #[error("voting rule failed: {0}")]
    Rule(#[from] conclave_core::social_choice::RuleError),
    #[error("prompt rendering failed: {0}")]
    Prompt(#[from] conclave_core::ach::PromptError),
    #[error("embedding failed: {0}")]
    Embed(#[from] conclave_core::rewards::EmbedError),
}

/// Prompt templates in force for a run; defaults are the built-ins, configs
/// may override any of them from files at startup.
#[derive(Debug, Clone)]
pub struct TemplateSet {
    pub full_ach: String,
    pub simplified_ach: String,
    pub unstructured: String,
    pub ranking_shots: String,
}

pub const DEFAULT_RANKING_SHOTS: &str = include_str!("../assets/ranking_shots.txt");

impl Default for TemplateSet {
    fn default() -> Self {
        Self {
            full_ach: FULL_ACH_TEMPLATE.to_string(),
            simplified_ach: SIMPLIFIED_ACH_TEMPLATE.to_string(),
            unstructured: UNSTRUCTURED_TEMPLATE.to_string(),
            ranking_shots: DEFAULT_RANKING_SHOTS.to_string(),
        }
    }
}

impl TemplateSet {
    fn for_variant(&self, variant: PromptVariant) -> &str {
        match variant {
            PromptVariant::FullAch => &self.full_ach,
            PromptVariant::SimplifiedAch => &self.simplified_ach,
            PromptVariant::Unstructured => &self.unstructured,
        }
    }
}

/// Which of an executor's n samples becomes its candidate answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateSelection {
    /// The first sample (the default).
    #[default]
    First,
    /// The sample whose extracted label is the most common across all n
    /// samples; falls back to the first sample when nothing extracts.
    MajorityOfN,
}

/// Reward scoring attached to decider-based episodes.
pub struct ScoringContext<'a> {
    pub stage: Stage,
    pub options: ScoreOptions,
    pub protocol_reference: &'a str,
    pub embedder: &'a (dyn Embedder + Sync),
}

/// Everything a single episode needs besides the item itself.
pub struct EpisodeContext<'a> {
    pub pool: &'a AgentPool,
    pub executor_ids: &'a [String],
    pub strategy: &'a Strategy,
    /// Heterogeneous-pool mode: sample this many executors per item.
    pub pool_k: Option<usize>,
    pub pool_seed: u64,
    pub candidate_selection: CandidateSelection,
    pub templates: &'a TemplateSet,
    pub scoring: Option<&'a ScoringContext<'a>>,
}

/// The question body shared by executor prompts and decision prompts.
pub fn question_block(item: &McqaItem) -> String {
    let mut block = format!("Question: {}\n\nOptions:\n", item.question);
    for option in &item.options {
        block.push_str(&format!("{}. {}\n", option.label, option.text));
    }
    block
}

/// The identical prompt every executor receives. Voting strategies append
/// the few-shot ranking elicitation.
pub fn executor_prompt(item: &McqaItem, elicit_ranking: bool, shots: &str) -> String {
    if elicit_ranking {
        format!(
            "{shots}\n\nAnswer the following multiple-choice question. First give your best option on a line \"Answer: <letter>\", then rank every option from best to worst on a line \"Ranking: <letter> > <letter> > ...\".\n\n{}",
            question_block(item)
        )
    } else {
        format!(
            "Answer the following multiple-choice question. Reply with your chosen option on a line of the form \"Answer: <letter>\".\n\n{}",
            question_block(item)
        )
    }
}

/// Bounded fan-out for concurrent backend calls.
const FANOUT_CAP: usize = 4;

/// Run the execution phase: every executor answers the identical prompt,
/// replies are assembled in executor order. Failing executors are dropped
/// with a trace note; the phase only errors when every executor fails.
pub fn run_execution_phase(
    item: &McqaItem,
    executors: &[&Agent],
    elicit_ranking: bool,
    shots: &str,
    candidate_selection: CandidateSelection,
) -> Result<(History, Vec<String>), EpisodeError> {
    let prompt = executor_prompt(item, elicit_ranking, shots);
    let labels = item.labels();

    let mut results: Vec<Option<Result<Vec<AgentResponse>, AgentError>>> =
        (0..executors.len()).map(|_| None).collect();
    for (chunk_start, chunk) in executors.chunks(FANOUT_CAP).enumerate().map(|(i, c)| (i * FANOUT_CAP, c)) {
        std::thread::scope(|scope| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|agent| {
                    let prompt = &prompt;
                    scope.spawn(move || agent.generate(prompt, agent.sampling()))
                })
                .collect();
            for (offset, handle) in handles.into_iter().enumerate() {
                results[chunk_start + offset] = Some(handle.join().expect("agent thread panicked"));
            }
        });
    }

    let mut responses = Vec::new();
    let mut trace = Vec::new();
    for (agent, result) in executors.iter().zip(results) {
        match result.expect("all slots filled") {
            Ok(samples) => {
                let mut candidate = pick_candidate(&samples, &labels, candidate_selection);
                candidate.extracted_label = extract_choice(&candidate.text, &labels);
                responses.push(candidate);
            }
            Err(e) => trace.push(format!("executor {} failed and was omitted: {e}", agent.id())),
        }
    }
    if responses.is_empty() {
        return Err(EpisodeError::AllAgentsFailed);
    }
    Ok((History { query: question_block(item), responses }, trace))
}

fn pick_candidate(
    samples: &[AgentResponse],
    labels: &[&str],
    selection: CandidateSelection,
) -> AgentResponse {
    match selection {
        CandidateSelection::First => samples[0].clone(),
        CandidateSelection::MajorityOfN => {
            let mut votes: BTreeMap<String, u32> = BTreeMap::new();
            for sample in samples {
                if let Some(label) = extract_choice(&sample.text, labels) {
                    *votes.entry(label).or_default() += 1;
                }
            }
            let majority = votes.into_iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)));
            match majority {
                Some((label, _)) => samples
                    .iter()
                    .find(|s| extract_choice(&s.text, labels).as_deref() == Some(&label))
                    .expect("label extracted from some sample")
                    .clone(),
                None => samples[0].clone(),
            }
        }
    }
}

/// Resolve the decision phase for one history under the given strategy.
pub fn run_decision_phase(
    history: &History,
    item: &McqaItem,
    strategy: &Strategy,
    pool: &AgentPool,
    templates: &TemplateSet,
) -> Result<DecisionRecord, EpisodeError> {
    decide(history, item, strategy, pool, templates).map(|(record, _)| record)
}

/// Decision phase returning the decider's raw response alongside the
/// record so episode scoring never issues a second decider call.
fn decide(
    history: &History,
    item: &McqaItem,
    strategy: &Strategy,
    pool: &AgentPool,
    templates: &TemplateSet,
) -> Result<(DecisionRecord, Option<String>), EpisodeError> {
    let labels = item.labels();
    let mut trace = Vec::new();
    let final_label: Option<String>;
    let mut ach_report: Option<AchReport> = None;
    let mut vote_result: Option<VoteResult> = None;
    let mut decider_raw: Option<String> = None;

    match strategy {
        Strategy::SingleAgent { agent } => {
            let response = history
                .responses
                .iter()
                .find(|r| r.agent_id == *agent)
                .ok_or_else(|| EpisodeError::AgentNotInHistory(agent.clone()))?;
            final_label = response.extracted_label.clone();
        }
        Strategy::Voting { rule } => {
            let (result, ballot_trace) = resolve_by_vote(history, &labels, *rule)?;
            trace.extend(ballot_trace);
            final_label = Some(result.winner.clone());
            vote_result = Some(result);
        }
        Strategy::InformedDictatorial { decider } => {
            let raw = call_decider(pool, decider, history, PromptVariant::Unstructured, templates)?;
            final_label = extract_choice(&raw, &labels);
            if final_label.is_none() {
                trace.push("decider reply named no option".to_string());
            }
            decider_raw = Some(raw);
        }
        Strategy::AchDecision { decider, variant } => {
            let raw = call_decider(pool, decider, history, *variant, templates)?;
            final_label = extract_choice(&raw, &labels);
            match parse_decision_output(&raw) {
                Ok(output) => match parse_ach_report(&output.think) {
                    Ok(report) => {
                        for violation in validate_report(&report, *variant) {
                            trace.push(format!("protocol violation: {violation}"));
                        }
                        if report.final_decision != report.tentative_selection {
                            trace.push(format!(
                                "adversarial testing overturned the tentative selection: {} -> {}",
                                report.tentative_selection, report.final_decision
                            ));
                        }
                        if let Some(label) = &final_label {
                            if *label != report.final_answer {
                                trace.push(format!(
                                    "answer block {label} diverges from report decision {}",
                                    report.final_answer
                                ));
                            }
                        }
                        ach_report = Some(report);
                    }
                    Err(e) => trace.push(format!("report unparseable: {e}")),
                },
                Err(e) => trace.push(format!("malformed decider output: {e}")),
            }
            decider_raw = Some(raw);
        }
    }

    let correct = final_label.as_deref() == Some(item.gold_label.as_str());
    let record = DecisionRecord {
        item_id: item.id.clone(),
        strategy: strategy.clone(),
        history: history.clone(),
        final_label,
        correct,
        ach_report,
        vote_result,
        breakdown: None,
        trace,
    };
    Ok((record, decider_raw))
}

/// Build ballots from the history and apply the rule. Agents whose text
/// yields no ranking fall back to their extracted first choice as a
/// length-1 ballot; agents with neither abstain.
fn resolve_by_vote(
    history: &History,
    labels: &[&str],
    rule: VotingRule,
) -> Result<(VoteResult, Vec<String>), EpisodeError> {
    let mut trace = Vec::new();
    let mut rankings: Vec<Vec<String>> = Vec::new();
    for response in &history.responses {
        if let Some(ranking) = extract_ranking(&response.text, labels) {
            rankings.push(ranking);
        } else if let Some(label) = &response.extracted_label {
            trace.push(format!(
                "agent {} ballot fell back to its first choice",
                response.agent_id
            ));
            rankings.push(vec![label.clone()]);
        } else {
            trace.push(format!("agent {} abstained (no parseable ballot)", response.agent_id));
        }
    }
    if rankings.is_empty() {
        return Err(EpisodeError::NoValidBallots);
    }

    let candidates: Vec<Candidate> = labels.iter().map(|l| Candidate::new(*l)).collect();
    let score_max = conclave_core::social_choice::DEFAULT_SCORE_MAX;
    let ballots: Vec<Ballot> = if rule.wants_ranked() {
        rankings.into_iter().map(Ballot::Ranked).collect()
    } else {
        // Cardinal rules read positional scores off the ranking: top rank
        // scores score_max, last rank 0, linear in between, unranked 0.
        rankings
            .into_iter()
            .map(|ranking| {
                let span = (labels.len() - 1).max(1) as u32;
                let scores: BTreeMap<String, u32> = ranking
                    .into_iter()
                    .enumerate()
                    .map(|(pos, label)| {
                        let numerator = (span - (pos as u32).min(span)) * score_max;
                        (label, (2 * numerator + span) / (2 * span))
                    })
                    .collect();
                Ballot::Cardinal(scores)
            })
            .collect()
    };
    let profile = Profile::new(candidates, ballots, score_max)?;
    Ok((rule.apply(&profile)?, trace))
}

fn call_decider(
    pool: &AgentPool,
    decider_id: &str,
    history: &History,
    variant: PromptVariant,
    templates: &TemplateSet,
) -> Result<String, EpisodeError> {
    let decider = pool.get(decider_id)?;
    let candidates: Vec<(&str, &str)> = history
        .responses
        .iter()
        .map(|r| (r.agent_id.as_str(), r.text.as_str()))
        .collect();
    if candidates.is_empty() {
        return Err(EpisodeError::Prompt(conclave_core::ach::PromptError::EmptyCandidates));
    }
    let prompt = render_template(templates.for_variant(variant), &history.query, &candidates);
    // One unified answer per decision: a single sample at the configured
    // temperature.
    let params = SamplingParams { n: 1, ..*decider.sampling() };
    let mut responses =
        decider.generate(&prompt, &params).map_err(EpisodeError::DeciderFailed)?;
    Ok(responses.remove(0).text)
}

/// Run one full episode: optional heterogeneous-pool sampling, execution
/// phase, decision phase, and reward scoring when configured.
pub fn run_episode(item: &McqaItem, ctx: &EpisodeContext) -> Result<DecisionRecord, EpisodeError> {
    let all_executors: Vec<&Agent> = ctx
        .executor_ids
        .iter()
        .map(|id| ctx.pool.get(id))
        .collect::<Result<_, _>>()?;
    let executors: Vec<&Agent> = match ctx.pool_k {
        Some(k) => {
            // Per-item stream: reruns with the same seed choose the same
            // subset for the same item regardless of item order.
            let mut rng = SplitMix64::new(ctx.pool_seed ^ fnv1a64(&item.id));
            sample_pool(&all_executors, k, &mut rng)?
        }
        None => all_executors,
    };

    let (history, mut trace) = run_execution_phase(
        item,
        &executors,
        ctx.strategy.elicits_ranking(),
        &ctx.templates.ranking_shots,
        ctx.candidate_selection,
    )?;
    let (mut record, decider_raw) =
        decide(&history, item, ctx.strategy, ctx.pool, ctx.templates)?;
    trace.append(&mut record.trace);
    record.trace = trace;

    if let (Some(scoring), Some(raw)) = (ctx.scoring, decider_raw) {
        record.breakdown = Some(match scoring.stage {
            Stage::Stage1 => stage1_score_with(&raw, &item.gold_label, &scoring.options),
            Stage::Stage2 => stage2_score_with(
                &raw,
                &item.gold_label,
                scoring.protocol_reference,
                scoring.embedder,
                &scoring.options,
            )?,
        });
    }

    Ok(record)
}
