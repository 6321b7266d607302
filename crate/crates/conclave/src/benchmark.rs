//! MCQA dataset ingestion, accuracy reports with deltas against the
//! single-agent baseline, and the agent-count scaling sweep.
//!
//! Datasets are JSONL, one object per line:
//! `{"id", "question", "options": [{"label", "text"}], "gold", "subject"}`
//! with labels drawn from A..J in order and `subject` optional.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::orchestrator::{run_episode, DecisionRecord, EpisodeContext, EpisodeError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McqaOption {
    pub label: String,
    pub text: String,
}

/// One benchmark question with labeled options and a gold label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McqaItem {
    pub id: String,
    pub question: String,
    pub options: Vec<McqaOption>,
    #[serde(rename = "gold")]
    pub gold_label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
}

impl McqaItem {
    pub fn labels(&self) -> Vec<&str> {
        self.options.iter().map(|o| o.label.as_str()).collect()
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: not a valid item: {reason}")]
    Parse { line: usize, reason: String },
    #[error("item {id:?}: {reason}")]
    Validation { id: String, reason: String },
    #[error("item {id:?} appears more than once")]
    DuplicateId { id: String },
}

const LABEL_ALPHABET: [&str; 10] = ["A", "B", "C", "D", "E", "F", "G", "H", "I", "J"];

fn validate_item(item: &McqaItem) -> Result<(), DatasetError> {
    let fail = |reason: String| DatasetError::Validation { id: item.id.clone(), reason };
    if item.id.is_empty() {
        return Err(DatasetError::Validation { id: "<empty>".into(), reason: "empty id".into() });
    }
    if item.options.len() < 2 || item.options.len() > 10 {
        return Err(fail(format!("{} options, need 2..=10", item.options.len())));
    }
    for (i, option) in item.options.iter().enumerate() {
        if option.label != LABEL_ALPHABET[i] {
            return Err(fail(format!(
                "option {} is labeled {:?}, expected {:?}",
                i, option.label, LABEL_ALPHABET[i]
            )));
        }
    }
    if !item.options.iter().any(|o| o.label == item.gold_label) {
        return Err(fail(format!("gold label {:?} is not among the options", item.gold_label)));
    }
    Ok(())
}

/// Load and validate a JSONL dataset. Blank lines are allowed; duplicate
/// ids, bad option labeling, and out-of-range option counts are rejected.
pub fn load_dataset(path: &Path) -> Result<Vec<McqaItem>, DatasetError> {
    let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut items = Vec::new();
    let mut seen = BTreeSet::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let item: McqaItem = serde_json::from_str(line)
            .map_err(|e| DatasetError::Parse { line: idx + 1, reason: e.to_string() })?;
        validate_item(&item)?;
        if !seen.insert(item.id.clone()) {
            return Err(DatasetError::DuplicateId { id: item.id });
        }
        items.push(item);
    }
    Ok(items)
}

/// One table row: a strategy's accuracy and its delta against the
/// single-agent baseline of the same run set. Accuracies are percentages
/// kept at full precision; rounding happens only at rendering.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyRow {
    pub strategy: String,
    pub accuracy: f64,
    pub delta: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMetadata {
    pub pool: String,
    pub seeds: crate::config::Seeds,
    pub unix_time: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyReport {
    pub dataset: String,
    pub rows: Vec<AccuracyRow>,
    /// Per-subject breakdown, present when any item carries a subject.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub subjects: BTreeMap<String, Vec<AccuracyRow>>,
    pub metadata: ReportMetadata,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("baseline must be single-agent records over the same items: {0}")]
    BadBaseline(String),
    #[error("strategy {strategy:?} ran on a different item set than the baseline")]
    ItemMismatch { strategy: String },
    #[error("no records to report")]
    Empty,
}

fn accuracy_percent(records: &[&DecisionRecord]) -> f64 {
    let correct = records.iter().filter(|r| r.correct).count();
    100.0 * correct as f64 / records.len() as f64
}

/// Fold decision records into an accuracy report. `records` may contain
/// several strategies (including the baseline's own records); `baseline`
/// must be single-agent records over the same item set. Record order is
/// irrelevant.
pub fn evaluate_run(
    dataset: &str,
    items: &[McqaItem],
    records: &[DecisionRecord],
    baseline: &[DecisionRecord],
    metadata: ReportMetadata,
) -> Result<AccuracyReport, ReportError> {
    if records.is_empty() || baseline.is_empty() {
        return Err(ReportError::Empty);
    }
    if let Some(bad) = baseline.iter().find(|r| !r.strategy.is_single_agent()) {
        return Err(ReportError::BadBaseline(bad.strategy.display_name()));
    }
    let baseline_items: BTreeSet<&str> =
        baseline.iter().map(|r| r.item_id.as_str()).collect();
    let baseline_refs: Vec<&DecisionRecord> = baseline.iter().collect();
    let baseline_accuracy = accuracy_percent(&baseline_refs);

    // Group by strategy, preserving first-appearance order.
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Vec<&DecisionRecord>> = BTreeMap::new();
    for record in records {
        let name = record.strategy.display_name();
        if !groups.contains_key(&name) {
            order.push(name.clone());
        }
        groups.entry(name).or_default().push(record);
    }

    let subject_of: BTreeMap<&str, &str> = items
        .iter()
        .filter_map(|i| i.subject.as_deref().map(|s| (i.id.as_str(), s)))
        .collect();

    let mut rows = Vec::new();
    let mut subjects: BTreeMap<String, Vec<AccuracyRow>> = BTreeMap::new();
    for name in &order {
        let group = &groups[name];
        let group_items: BTreeSet<&str> = group.iter().map(|r| r.item_id.as_str()).collect();
        if group_items != baseline_items {
            return Err(ReportError::ItemMismatch { strategy: name.clone() });
        }
        let accuracy = accuracy_percent(group);
        rows.push(AccuracyRow {
            strategy: name.clone(),
            accuracy,
            delta: accuracy - baseline_accuracy,
            n: group.len(),
        });

        if !subject_of.is_empty() {
            let mut by_subject: BTreeMap<&str, Vec<&DecisionRecord>> = BTreeMap::new();
            for record in group {
                if let Some(subject) = subject_of.get(record.item_id.as_str()) {
                    by_subject.entry(subject).or_default().push(record);
                }
            }
            for (subject, subset) in by_subject {
                let baseline_subset: Vec<&DecisionRecord> = baseline
                    .iter()
                    .filter(|r| subject_of.get(r.item_id.as_str()) == Some(&subject))
                    .collect();
                let accuracy = accuracy_percent(&subset);
                subjects.entry(subject.to_string()).or_default().push(AccuracyRow {
                    strategy: name.clone(),
                    accuracy,
                    delta: accuracy - accuracy_percent(&baseline_subset),
                    n: subset.len(),
                });
            }
        }
    }

    Ok(AccuracyReport { dataset: dataset.to_string(), rows, subjects, metadata })
}

fn format_cell(row: &AccuracyRow, is_baseline: bool) -> String {
    if is_baseline {
        format!("{:.1}", row.accuracy)
    } else {
        format!("{:.1}({:+.1})", row.accuracy, row.delta)
    }
}

fn render_rows(out: &mut String, rows: &[AccuracyRow]) {
    let name_width = rows
        .iter()
        .map(|r| r.strategy.len())
        .chain(["Strategy".len()])
        .max()
        .unwrap_or(8);
    let cells: Vec<String> = rows
        .iter()
        .map(|r| format_cell(r, r.delta == 0.0 && r.strategy.starts_with("Single Agent")))
        .collect();
    let acc_width = cells
        .iter()
        .map(String::len)
        .chain(["Accuracy".len()])
        .max()
        .unwrap_or(8);
    out.push_str(&format!(
        "{:<name_width$}  {:>acc_width$}  {:>5}\n",
        "Strategy", "Accuracy", "Items"
    ));
    for (row, cell) in rows.iter().zip(cells) {
        out.push_str(&format!(
            "{:<name_width$}  {:>acc_width$}  {:>5}\n",
            row.strategy, cell, row.n
        ));
    }
}

/// Plain-text table: accuracy column in `70.6(+3.6)` style against the
/// single-agent baseline, one decimal, column-aligned, with per-subject
/// sections when subjects are known.
pub fn render_table(report: &AccuracyReport) -> String {
    let mut out = format!("dataset: {}\n\n", report.dataset);
    render_rows(&mut out, &report.rows);
    for (subject, rows) in &report.subjects {
        out.push_str(&format!("\nsubject: {subject}\n"));
        render_rows(&mut out, rows);
    }
    out
}

/// Run the strategy at each executor count (a prefix of the executor list)
/// and report accuracy per count. Each count runs under its own derived
/// seed, so reruns reproduce exactly.
pub fn scaling_table(
    items: &[McqaItem],
    counts: &[usize],
    base: &EpisodeContext,
) -> Result<Vec<(usize, f64)>, EpisodeError> {
    let mut rows = Vec::new();
    for (ladder_index, &count) in counts.iter().enumerate() {
        if count > base.executor_ids.len() {
            return Err(EpisodeError::Agent(crate::agents::AgentError::KTooLarge {
                k: count,
                pool: base.executor_ids.len(),
            }));
        }
        let ctx = EpisodeContext {
            executor_ids: &base.executor_ids[..count],
            pool_seed: base.pool_seed + ladder_index as u64,
            ..*base
        };
        let mut correct = 0usize;
        for item in items {
            if run_episode(item, &ctx)?.correct {
                correct += 1;
            }
        }
        rows.push((count, 100.0 * correct as f64 / items.len() as f64));
    }
    Ok(rows)
}

/// CSV rendering of a scaling sweep: `count,accuracy` with one decimal.
pub fn render_scaling_csv(rows: &[(usize, f64)]) -> String {
    rows.iter().map(|(count, acc)| format!("{count},{acc:.1}\n")).collect()
}

/// Serialize records as JSONL, one record per line, fixed field order.
pub fn records_to_jsonl(records: &[DecisionRecord]) -> String {
    records
        .iter()
        .map(|r| serde_json::to_string(r).expect("record serializes") + "\n")
        .collect()
}
