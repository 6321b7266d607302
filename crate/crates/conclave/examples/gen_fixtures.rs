//! Regenerates everything under data/: the synthetic dataset, scripted
//! agent fixtures, run configs, the scoring fixture transcript, sample
//! artifacts, and the golden eval table.
//!
//! Run from the workspace root:
//!
//! ```text
//! cargo run -p conclave --example gen_fixtures
//! ```
//!
//! The output is fully deterministic; rerunning must produce byte-identical
//! files unless prompts, templates, or fixture formats changed. The golden
//! table is produced by actually executing the demo run, so a regeneration
//! after an intentional format change refreshes the expectations in one
//! step.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use conclave::agents::{Agent, AgentRole, AgentSpec, BackendSpec, SamplingParams};
use conclave::benchmark::{McqaItem, McqaOption};
use conclave::config::load_config;
use conclave::orchestrator::{run_execution_phase, CandidateSelection, TemplateSet};
use conclave::runner::execute_run;
use conclave_core::ach::{render_template, AchMatrix, AchReport, CellMark, Evidence, Hypothesis};
use conclave_core::hash::fnv1a64_hex;

const LABELS: [&str; 4] = ["A", "B", "C", "D"];

fn wrong_label(gold: &str) -> &'static str {
    let idx = LABELS.iter().position(|l| *l == gold).unwrap();
    LABELS[(idx + 1) % LABELS.len()]
}

fn items() -> Vec<McqaItem> {
    (0..20usize)
        .map(|i| {
            let a = i as i32 + 3;
            let b = (i as i32 * 3) % 7 + 2;
            let sum = a + b;
            // Rotate the option block so the gold label cycles A, B, C, D.
            let gold_pos = i % 4;
            let values: Vec<i32> =
                (0..4i32).map(|slot| sum + slot - gold_pos as i32).collect();
            McqaItem {
                id: format!("syn-{:02}", i + 1),
                question: format!("What is {a} + {b}?"),
                options: values
                    .iter()
                    .enumerate()
                    .map(|(slot, value)| McqaOption {
                        label: LABELS[slot].to_string(),
                        text: value.to_string(),
                    })
                    .collect(),
                gold_label: LABELS[gold_pos].to_string(),
                subject: Some(if i % 2 == 0 { "arithmetic" } else { "series" }.to_string()),
            }
        })
        .collect()
}

fn plain_response(label: &str) -> String {
    format!("Answer: {label}")
}

/// Ballot text for a correct agent: gold first, the rest in label order.
fn correct_ballot(item: &McqaItem) -> String {
    let gold = item.gold_label.as_str();
    let mut order = vec![gold];
    order.extend(item.labels().into_iter().filter(|l| *l != gold));
    format!("Answer: {gold}\nRanking: {}", order.join(" > "))
}

/// Ballot text for a wrong agent: the distractor first, gold dead last.
fn wrong_ballot(item: &McqaItem) -> String {
    let gold = item.gold_label.as_str();
    let wrong = wrong_label(gold);
    let mut order = vec![wrong];
    order.extend(item.labels().into_iter().filter(|l| *l != gold && *l != wrong));
    order.push(gold);
    format!("Answer: {wrong}\nRanking: {}", order.join(" > "))
}

struct FixtureBuilder {
    entries: BTreeMap<String, Vec<String>>,
}

impl FixtureBuilder {
    fn new() -> Self {
        Self { entries: BTreeMap::new() }
    }

    fn add(&mut self, prompt: &str, response: String) {
        self.entries.insert(fnv1a64_hex(prompt), vec![response]);
    }

    fn write(&self, path: &Path) {
        let json = serde_json::to_string_pretty(&self.entries).unwrap();
        fs::write(path, json + "\n").unwrap();
    }
}

/// Per-agent correctness table for the five-agent pool: prefix pools of
/// sizes 1, 3, 5 under plurality land at 60%, 80%, 100%.
fn pool_correct(agent: usize, item: usize) -> bool {
    match agent {
        0 => item < 12,
        1 => item < 16,
        2 => true,
        3 => (12..20).contains(&item),
        4 => (12..20).contains(&item),
        _ => unreachable!(),
    }
}

fn scripted_spec(id: &str, role: AgentRole, fixture: PathBuf) -> AgentSpec {
    AgentSpec { id: id.to_string(), role, backend: BackendSpec::Scripted { fixture }, sampling: SamplingParams::default() }
}

fn sample_think(item: &McqaItem) -> String {
    let gold = item.gold_label.as_str();
    let wrong = wrong_label(gold);
    let gold_text = &item.options[LABELS.iter().position(|l| *l == gold).unwrap()].text;
    let hypotheses = vec![
        Hypothesis::from_statement("H1", format!("The sum is {gold_text} -> {gold}")),
        Hypothesis::from_statement("H2", format!("The sum is off by one -> {wrong}")),
    ];
    let evidence = vec![
        Evidence::new("E1", format!("Direct addition gives {gold_text}"), "agent-1"),
        Evidence::new("E2", "The question asks for an exact sum", "query"),
    ];
    let matrix = AchMatrix::new(
        vec!["H1".into(), "H2".into()],
        vec!["E1".into(), "E2".into()],
        vec![
            vec![CellMark::Consistent, CellMark::Inconsistent],
            vec![CellMark::Consistent, CellMark::Irrelevant],
        ],
    )
    .unwrap();
    AchReport::new(
        hypotheses,
        evidence,
        matrix,
        "No anchoring detected; ratings follow the arithmetic".into(),
        "H1".into(),
        "An off-by-one error would contradict E1; none found".into(),
        "H1".into(),
        gold.to_string(),
        BTreeMap::from([("H2".to_string(), "inconsistent with E1".to_string())]),
        "high".into(),
    )
    .unwrap()
    .to_think_text()
}

fn rollout_cases(items: &[McqaItem]) -> (String, String) {
    let mut lines = Vec::new();
    let mut expected = Vec::new();
    for case in 0..50 {
        let item = &items[case % items.len()];
        let gold = item.gold_label.as_str();
        let wrong = wrong_label(gold);
        let full_think = sample_think(item);
        let (response, fmt, acc): (String, f64, f64) = match case % 10 {
            0 => (format!("<think>\n{full_think}</think>\n<answer>{gold}</answer>"), 1.0, 1.0),
            1 => {
                // The canonical report asserts gold, so swap the decision to
                // keep the structure valid while the answer block is wrong.
                let think = full_think
                    .replace(&format!("Decision: H1 -> {gold}"), &format!("Decision: H2 -> {wrong}"));
                (format!("<think>\n{think}</think>\n<answer>{wrong}</answer>"), 1.0, 0.0)
            }
            2 => (format!("<think>adding the numbers directly</think><answer>{gold}</answer>"), 1.0, 1.0),
            3 => (format!("<think>adding the numbers directly</think><answer>{wrong}</answer>"), 1.0, 0.0),
            4 => (format!("<think>reasoning without a verdict</think> the answer is {gold}"), 0.0, 0.0),
            5 => (format!("no think block at all <answer>{gold}</answer>"), 0.0, 0.0),
            6 => (format!("<answer>{gold}</answer><think>backwards</think>"), 0.0, 0.0),
            7 => (
                format!("<think>a</think><think>b</think><answer>{gold}</answer>"),
                0.0,
                0.0,
            ),
            8 => (format!("<think>quick check</think><answer>({}).</answer>", gold.to_lowercase()), 1.0, 1.0),
            9 => (
                format!(
                    "<think>Hypothesis Space\nH1: x -> {gold}\nEvidence Pool\nE1 [query]: y\nMeta-Cognitive Review\nclear\nAnalytical Report\nDecision: H1 -> {gold}</think><answer>{gold}</answer>"
                ),
                1.0,
                1.0,
            ),
            _ => unreachable!(),
        };
        let variant = if case % 2 == 0 { "FullACH" } else { "SimplifiedACH" };
        lines.push(
            serde_json::json!({
                "item_id": item.id,
                "prompt": format!("scored rollout for {}", item.id),
                "variant": variant,
                "response": response,
                "gold_label": gold,
                "step": case,
            })
            .to_string(),
        );
        expected.push(serde_json::json!({"format": fmt, "answer": acc}));
    }
    (
        lines.join("\n") + "\n",
        serde_json::to_string_pretty(&expected).unwrap() + "\n",
    )
}

fn main() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let data = root.join("data");
    for sub in ["agents", "configs", "golden", "fixtures", "samples", "profiles"] {
        fs::create_dir_all(data.join(sub)).unwrap();
    }

    let items = items();
    let dataset: String = items
        .iter()
        .map(|i| serde_json::to_string(i).unwrap() + "\n")
        .collect();
    fs::write(data.join("synthetic20.jsonl"), dataset).unwrap();

    let templates = TemplateSet::default();
    let shots = templates.ranking_shots.as_str();

    // Executor fixtures for the demo eval: two always-correct agents, one
    // always-wrong, each covering both the plain and the ranking prompt.
    for (name, correct) in [("exec-right-1", true), ("exec-right-2", true), ("exec-wrong-1", false)] {
        let mut fixture = FixtureBuilder::new();
        for item in &items {
            let plain = conclave::orchestrator::executor_prompt(item, false, shots);
            let ranked = conclave::orchestrator::executor_prompt(item, true, shots);
            if correct {
                fixture.add(&plain, plain_response(&item.gold_label));
                fixture.add(&ranked, correct_ballot(item));
            } else {
                fixture.add(&plain, plain_response(wrong_label(&item.gold_label)));
                fixture.add(&ranked, wrong_ballot(item));
            }
        }
        fixture.write(&data.join(format!("agents/{name}.json")));
    }

    // Five-agent pool with the per-item correctness table.
    for agent in 0..5 {
        let mut fixture = FixtureBuilder::new();
        for (idx, item) in items.iter().enumerate() {
            let plain = conclave::orchestrator::executor_prompt(item, false, shots);
            let ranked = conclave::orchestrator::executor_prompt(item, true, shots);
            if pool_correct(agent, idx) {
                fixture.add(&plain, plain_response(&item.gold_label));
                fixture.add(&ranked, correct_ballot(item));
            } else {
                fixture.add(&plain, plain_response(wrong_label(&item.gold_label)));
                fixture.add(&ranked, wrong_ballot(item));
            }
        }
        fixture.write(&data.join(format!("agents/pool-{}.json", agent + 1)));
    }

    // The echo decider answers with the majority of the executors' answers.
    // Its fixture is keyed by the exact unstructured decision prompt, so the
    // execution phase is replayed here through the same code path the
    // orchestrator uses.
    let executors: Vec<Agent> = [("exec-right-1", true), ("exec-right-2", true), ("exec-wrong-1", false)]
        .iter()
        .map(|(name, _)| {
            Agent::from_spec(scripted_spec(
                name,
                AgentRole::Executor,
                data.join(format!("agents/{name}.json")),
            ))
            .unwrap()
        })
        .collect();
    let executor_refs: Vec<&Agent> = executors.iter().collect();
    let mut judge = FixtureBuilder::new();
    for item in &items {
        let (history, trace) =
            run_execution_phase(item, &executor_refs, false, shots, CandidateSelection::First)
                .unwrap();
        assert!(trace.is_empty(), "scripted executors must not fail");
        let mut votes: BTreeMap<&str, u32> = BTreeMap::new();
        for response in &history.responses {
            if let Some(label) = &response.extracted_label {
                *votes.entry(item.labels()[item.labels().iter().position(|l| l == label).unwrap()])
                    .or_default() += 1;
            }
        }
        let majority = votes.iter().max_by_key(|(_, &c)| c).map(|(l, _)| *l).unwrap();
        let candidates: Vec<(&str, &str)> = history
            .responses
            .iter()
            .map(|r| (r.agent_id.as_str(), r.text.as_str()))
            .collect();
        let prompt = render_template(&templates.unstructured, &history.query, &candidates);
        judge.add(&prompt, plain_response(majority));
    }
    judge.write(&data.join("agents/judge-echo.json"));

    // Run configs.
    let config_json = |executors: &[&str], decider: Option<&str>, strategies: serde_json::Value, extra: serde_json::Value| {
        let mut config = serde_json::json!({
            "dataset": "../synthetic20.jsonl",
            "executors": executors.iter().map(|id| serde_json::json!({
                "id": id,
                "role": "executor",
                "backend": {"type": "scripted", "fixture": format!("../agents/{id}.json")},
            })).collect::<Vec<_>>(),
            "strategies": strategies,
        });
        if let Some(id) = decider {
            config["decider"] = serde_json::json!({
                "id": id,
                "role": "decider",
                "backend": {"type": "scripted", "fixture": format!("../agents/{id}.json")},
            });
        }
        if let serde_json::Value::Object(extra) = extra {
            config.as_object_mut().unwrap().extend(extra);
        }
        serde_json::to_string_pretty(&config).unwrap() + "\n"
    };

    fs::write(
        data.join("configs/eval_demo.json"),
        config_json(
            &["exec-right-1", "exec-right-2", "exec-wrong-1"],
            Some("judge-echo"),
            serde_json::json!([
                {"type": "single_agent", "agent": "exec-wrong-1"},
                {"type": "voting", "rule": "plurality"},
                {"type": "informed_dictatorial", "decider": "judge-echo"},
            ]),
            serde_json::json!({"output_dir": "../../runs/eval_demo"}),
        ),
    )
    .unwrap();

    fs::write(
        data.join("configs/hetero.json"),
        config_json(
            &["pool-1", "pool-2", "pool-3", "pool-4", "pool-5"],
            None,
            serde_json::json!([{"type": "voting", "rule": "plurality"}]),
            serde_json::json!({
                "pool_k": 3,
                "seeds": {"pool": 7},
                "output_dir": "../../runs/hetero",
            }),
        ),
    )
    .unwrap();

    fs::write(
        data.join("configs/scale.json"),
        config_json(
            &["pool-1", "pool-2", "pool-3", "pool-4", "pool-5"],
            None,
            serde_json::json!([{"type": "voting", "rule": "plurality"}]),
            serde_json::json!({"output_dir": "../../runs/scale"}),
        ),
    )
    .unwrap();

    // Scoring fixture transcript with construction-time expectations.
    let (transcript, expected) = rollout_cases(&items);
    fs::write(data.join("fixtures/rollouts50.jsonl"), transcript).unwrap();
    fs::write(data.join("fixtures/rollouts50_expected.json"), expected).unwrap();

    // Sample artifacts for the README walk-through.
    fs::write(data.join("samples/think_full.txt"), sample_think(&items[0])).unwrap();
    fs::write(
        data.join("profiles/p1.json"),
        serde_json::to_string_pretty(&serde_json::json!({
            "candidates": ["A", "B", "C"],
            "ballots": [
                ["A", "B", "C"], ["A", "B", "C"],
                ["B", "C", "A"], ["B", "C", "A"],
                ["C", "A", "B"],
            ],
            "score_max": 10,
        }))
        .unwrap()
            + "\n",
    )
    .unwrap();

    // Golden table: produced by actually executing the demo run.
    let config = load_config(&data.join("configs/eval_demo.json")).unwrap();
    let output = execute_run(&config, 1).unwrap();
    let table = output.table.expect("demo run has a single-agent baseline");
    fs::write(data.join("golden/eval_demo_table.txt"), &table).unwrap();

    println!("fixtures written under {}", data.display());
    print!("{table}");
}
