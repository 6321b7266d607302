//! Protocol-report properties: canonical serialize→parse identity over
//! randomly generated reports, row-order invariance of the falsification
//! step, render self-checks, and audit cleanliness of canonical reports.

use std::collections::BTreeMap;

use conclave_core::ach::{
    falsification_select, heading_line_count, parse_ach_report, render_decision_prompt,
    validate_report, AchMatrix, AchReport, CellMark, Evidence, Hypothesis, PromptVariant,
    FULL_HEADINGS,
};
use conclave_core::rng::SplitMix64;

const WORDS: [&str; 12] = [
    "alpha", "beta", "gamma", "delta", "omega", "signal", "window", "vector", "probe", "orbit",
    "filter", "basis",
];

const MARKS: [CellMark; 3] = [CellMark::Consistent, CellMark::Inconsistent, CellMark::Irrelevant];

fn words(rng: &mut SplitMix64, min: usize, max: usize) -> String {
    let n = min + rng.below((max - min + 1) as u64) as usize;
    (0..n)
        .map(|_| WORDS[rng.below(WORDS.len() as u64) as usize])
        .collect::<Vec<_>>()
        .join(" ")
}

fn random_matrix(rng: &mut SplitMix64, n_hyp: usize, n_ev: usize) -> AchMatrix {
    let hypothesis_ids: Vec<String> = (1..=n_hyp).map(|i| format!("H{i}")).collect();
    let evidence_ids: Vec<String> = (1..=n_ev).map(|i| format!("E{i}")).collect();
    let cells: Vec<Vec<CellMark>> = (0..n_ev)
        .map(|_| (0..n_hyp).map(|_| MARKS[rng.below(3) as usize]).collect())
        .collect();
    AchMatrix::new(hypothesis_ids, evidence_ids, cells).unwrap()
}

/// A structurally valid report with random content: hypotheses may share
/// labels or lack them, and the tentative selection need not follow the
/// falsification rule.
fn random_report(rng: &mut SplitMix64) -> AchReport {
    let n_hyp = 1 + rng.below(8) as usize;
    let n_ev = rng.below(13) as usize;
    let labels = ["A", "B", "C", "D", "E", "F", "G", "H", "I", "J"];

    let hypotheses: Vec<Hypothesis> = (1..=n_hyp)
        .map(|i| {
            let statement = if rng.below(10) == 0 {
                words(rng, 1, 5)
            } else if rng.below(5) == 0 {
                let first = labels[rng.below(10) as usize];
                let second = labels[rng.below(10) as usize];
                format!("{} -> {}, {}", words(rng, 1, 5), first, second)
            } else {
                format!("{} -> {}", words(rng, 1, 5), labels[rng.below(10) as usize])
            };
            Hypothesis::from_statement(format!("H{i}"), statement)
        })
        .collect();
    let evidence: Vec<Evidence> = (1..=n_ev)
        .map(|j| {
            let source = if rng.below(2) == 0 {
                "query".to_string()
            } else {
                format!("agent-{}", 1 + rng.below(4))
            };
            Evidence::new(format!("E{j}"), words(rng, 1, 6), source)
        })
        .collect();
    let matrix = random_matrix(rng, n_hyp, n_ev);

    let tentative = format!("H{}", 1 + rng.below(n_hyp as u64));
    let final_decision = format!("H{}", 1 + rng.below(n_hyp as u64));
    let chosen = hypotheses.iter().find(|h| h.id == final_decision).unwrap();
    let final_answer = chosen
        .covered_options
        .iter()
        .next()
        .cloned()
        .unwrap_or_else(|| "A".to_string());

    let mut rejection = BTreeMap::new();
    for h in &hypotheses {
        if h.id != final_decision && rng.below(2) == 0 {
            rejection.insert(h.id.clone(), words(rng, 1, 6));
        }
    }

    AchReport::new(
        hypotheses,
        evidence,
        matrix,
        if rng.below(2) == 0 { String::new() } else { words(rng, 1, 8) },
        tentative,
        if rng.below(2) == 0 { String::new() } else { words(rng, 1, 8) },
        final_decision,
        final_answer,
        rejection,
        if rng.below(2) == 0 { String::new() } else { words(rng, 1, 4) },
    )
    .unwrap()
}

#[test]
fn canonical_serialize_parse_identity() {
    let mut rng = SplitMix64::new(0x5eed);
    for case in 0..200 {
        let report = random_report(&mut rng);
        let text = report.to_think_text();
        let reparsed = parse_ach_report(&text)
            .unwrap_or_else(|e| panic!("case {case}: parse failed: {e}\n{text}"));
        assert_eq!(report, reparsed, "case {case} did not round-trip:\n{text}");
    }
}

#[test]
fn json_serialize_parse_identity() {
    let mut rng = SplitMix64::new(0xbead);
    for _ in 0..50 {
        let report = random_report(&mut rng);
        let json = serde_json::to_string(&report).unwrap();
        let back: AchReport = serde_json::from_str(&json).unwrap();
        assert_eq!(report, back);
    }
}

#[test]
fn falsification_ignores_evidence_row_order() {
    let mut rng = SplitMix64::new(0xf00d);
    for _ in 0..300 {
        let n_hyp = 1 + rng.below(6) as usize;
        let n_ev = 1 + rng.below(6) as usize;
        let matrix = random_matrix(&mut rng, n_hyp, n_ev);
        let winner = falsification_select(&matrix).to_string();

        // Rebuild with rows reversed; the winner must not move.
        let reversed_rows: Vec<Vec<CellMark>> = (0..n_ev)
            .rev()
            .map(|row| (0..n_hyp).map(|col| matrix.mark(row, col)).collect())
            .collect();
        let reversed = AchMatrix::new(
            matrix.hypothesis_ids().to_vec(),
            matrix.evidence_ids().iter().rev().cloned().collect(),
            reversed_rows,
        )
        .unwrap();
        assert_eq!(falsification_select(&reversed), winner);
    }
}

#[test]
fn full_renders_self_check_all_headings_once() {
    let mut rng = SplitMix64::new(0xabcd);
    for _ in 0..100 {
        let query = words(&mut rng, 2, 10);
        let n = 1 + rng.below(5) as usize;
        let ids: Vec<String> = (1..=n).map(|i| format!("agent-{i}")).collect();
        let answers: Vec<String> = (0..n).map(|_| words(&mut rng, 1, 6)).collect();
        let candidates: Vec<(&str, &str)> = ids
            .iter()
            .map(String::as_str)
            .zip(answers.iter().map(String::as_str))
            .collect();
        let text =
            render_decision_prompt(&query, &candidates, PromptVariant::FullAch).unwrap();
        for heading in FULL_HEADINGS {
            assert_eq!(heading_line_count(&text, heading), 1, "heading {heading}");
        }
    }
}

#[test]
fn canonical_compliant_reports_audit_clean() {
    let mut rng = SplitMix64::new(0xcafe);
    let labels = ["A", "B", "C", "D", "E", "F", "G", "H", "I", "J"];
    for _ in 0..100 {
        let n_hyp = 2 + rng.below(7) as usize;
        let n_ev = 1 + rng.below(12) as usize;
        let matrix = random_matrix(&mut rng, n_hyp, n_ev);
        // Disjoint option labels keep the hypothesis space mutually
        // exclusive.
        let hypotheses: Vec<Hypothesis> = (1..=n_hyp)
            .map(|i| {
                Hypothesis::from_statement(
                    format!("H{i}"),
                    format!("{} -> {}", words(&mut rng, 1, 4), labels[i - 1]),
                )
            })
            .collect();
        let evidence: Vec<Evidence> =
            (1..=n_ev).map(|j| Evidence::new(format!("E{j}"), words(&mut rng, 1, 4), "query")).collect();
        let tentative = falsification_select(&matrix).to_string();
        let answer = hypotheses
            .iter()
            .find(|h| h.id == tentative)
            .unwrap()
            .covered_options
            .iter()
            .next()
            .cloned()
            .unwrap();
        let report = AchReport::new(
            hypotheses,
            evidence,
            matrix,
            words(&mut rng, 1, 6),
            tentative.clone(),
            words(&mut rng, 1, 6),
            tentative,
            answer,
            BTreeMap::new(),
            "moderate".to_string(),
        )
        .unwrap();
        assert_eq!(validate_report(&report, PromptVariant::FullAch), vec![]);

        // And the canonical rendering scores a perfect protocol pattern.
        assert_eq!(conclave_core::rewards::ach_pattern_reward(&report.to_think_text()), 1.0);
    }
}
