use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::Serialize;

use super::prompt::PromptVariant;
use super::types::{AchMatrix, AchReport, CellMark};

/// The falsification step: pick the hypothesis with the fewest Inconsistent
/// marks. Ties prefer more Consistent marks, then the earliest position in
/// the hypothesis list. Row order never affects the outcome.
pub fn falsification_select(matrix: &AchMatrix) -> &str {
    let mut best = 0usize;
    let mut best_counts = column_counts(matrix, 0);
    for idx in 1..matrix.hypothesis_ids().len() {
        let counts = column_counts(matrix, idx);
        // (inconsistent asc, consistent desc); earlier index wins remaining ties.
        if counts.0 < best_counts.0 || (counts.0 == best_counts.0 && counts.1 > best_counts.1) {
            best = idx;
            best_counts = counts;
        }
    }
    &matrix.hypothesis_ids()[best]
}

/// (inconsistent, consistent) mark counts of one hypothesis column.
fn column_counts(matrix: &AchMatrix, idx: usize) -> (usize, usize) {
    let mut inconsistent = 0;
    let mut consistent = 0;
    for mark in matrix.column(idx) {
        match mark {
            CellMark::Inconsistent => inconsistent += 1,
            CellMark::Consistent => consistent += 1,
            CellMark::Irrelevant => {}
        }
    }
    (inconsistent, consistent)
}

/// A protocol-compliance finding. An empty finding list means the report is
/// compliant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// The tentative selection is not the falsification minimum.
    SelectionContradictsFalsification { tentative: String, expected: String },
    EmptyEvidencePool,
    /// A single hypothesis is not a competing set.
    SingleHypothesis,
    /// Two hypotheses assert the same option, so the space is not mutually
    /// exclusive.
    NonExclusiveHypotheses { first: String, second: String, label: String },
    /// Full-protocol reports must carry adversarial testing notes.
    MissingAdversarialNotes,
    /// Hypothesis statement names no option label, so no answer can be
    /// recovered from it mechanically.
    UnlabeledHypothesis { id: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SelectionContradictsFalsification { tentative, expected } => write!(
                f,
                "selection contradicts falsification: tentative {tentative} but {expected} has the least disconfirming evidence"
            ),
            Violation::EmptyEvidencePool => write!(f, "empty evidence pool"),
            Violation::SingleHypothesis => write!(f, "single hypothesis"),
            Violation::NonExclusiveHypotheses { first, second, label } => {
                write!(f, "hypotheses {first} and {second} both assert option {label}")
            }
            Violation::MissingAdversarialNotes => write!(f, "empty adversarial testing notes"),
            Violation::UnlabeledHypothesis { id } => {
                write!(f, "hypothesis {id} names no option label")
            }
        }
    }
}

/// Audit a structurally valid report for protocol violations. The prompt
/// variant scopes the adversarial-notes requirement to full-protocol runs.
pub fn validate_report(report: &AchReport, variant: PromptVariant) -> Vec<Violation> {
    let mut violations = Vec::new();

    let expected = falsification_select(&report.matrix);
    if report.tentative_selection != expected {
        violations.push(Violation::SelectionContradictsFalsification {
            tentative: report.tentative_selection.clone(),
            expected: String::from(expected),
        });
    }
    if report.evidence.is_empty() {
        violations.push(Violation::EmptyEvidencePool);
    }
    if report.hypotheses.len() < 2 {
        violations.push(Violation::SingleHypothesis);
    }
    for (i, first) in report.hypotheses.iter().enumerate() {
        for second in &report.hypotheses[i + 1..] {
            if let Some(label) = first
                .covered_options
                .intersection(&second.covered_options)
                .next()
            {
                violations.push(Violation::NonExclusiveHypotheses {
                    first: first.id.clone(),
                    second: second.id.clone(),
                    label: label.clone(),
                });
            }
        }
    }
    if variant == PromptVariant::FullAch && report.adversarial_notes.trim().is_empty() {
        violations.push(Violation::MissingAdversarialNotes);
    }
    for h in &report.hypotheses {
        if h.covered_options.is_empty() {
            violations.push(Violation::UnlabeledHypothesis { id: h.id.clone() });
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ach::types::{Evidence, Hypothesis};
    use alloc::collections::BTreeMap;
    use alloc::string::ToString;
    use alloc::vec;

    fn matrix(columns: &[&[CellMark]]) -> AchMatrix {
        let hypothesis_ids: Vec<String> =
            (1..=columns.len()).map(|i| alloc::format!("H{i}")).collect();
        let evidence_ids: Vec<String> =
            (1..=columns[0].len()).map(|i| alloc::format!("E{i}")).collect();
        let cells: Vec<Vec<CellMark>> = (0..columns[0].len())
            .map(|row| columns.iter().map(|col| col[row]).collect())
            .collect();
        AchMatrix::new(hypothesis_ids, evidence_ids, cells).unwrap()
    }

    use CellMark::{Consistent as C, Inconsistent as I, Irrelevant as N};

    #[test]
    fn strict_minimum_wins() {
        let m = matrix(&[&[C, C, N], &[I, C, I]]);
        assert_eq!(falsification_select(&m), "H1");
    }

    #[test]
    fn tie_broken_by_consistent_count() {
        let m = matrix(&[&[I, C, C], &[I, C, N]]);
        assert_eq!(falsification_select(&m), "H1");
        let m = matrix(&[&[I, C, N], &[I, C, C]]);
        assert_eq!(falsification_select(&m), "H2");
    }

    #[test]
    fn full_tie_takes_first_listed() {
        let m = matrix(&[&[N, N], &[N, N], &[N, N]]);
        assert_eq!(falsification_select(&m), "H1");
    }

    fn compliant_report() -> AchReport {
        let hypotheses = vec![
            Hypothesis::from_statement("H1", "first -> A"),
            Hypothesis::from_statement("H2", "second -> B"),
        ];
        let evidence = vec![
            Evidence::new("E1", "fact one", "agent-1"),
            Evidence::new("E2", "fact two", "query"),
        ];
        let m = AchMatrix::new(
            vec!["H1".to_string(), "H2".to_string()],
            vec!["E1".to_string(), "E2".to_string()],
            vec![vec![C, I], vec![C, I]],
        )
        .unwrap();
        AchReport::new(
            hypotheses,
            evidence,
            m,
            "reviewed".to_string(),
            "H1".to_string(),
            "attacked, held".to_string(),
            "H1".to_string(),
            "A".to_string(),
            BTreeMap::new(),
            "high".to_string(),
        )
        .unwrap()
    }

    #[test]
    fn compliant_report_has_no_violations() {
        assert!(validate_report(&compliant_report(), PromptVariant::FullAch).is_empty());
    }

    #[test]
    fn contradicting_selection_is_flagged() {
        let mut report = compliant_report();
        report.tentative_selection = "H2".to_string();
        report.final_decision = "H2".to_string();
        report.final_answer = "B".to_string();
        let violations = validate_report(&report, PromptVariant::FullAch);
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::SelectionContradictsFalsification { .. })));
    }

    #[test]
    fn missing_adversarial_notes_only_matter_for_full_protocol() {
        let mut report = compliant_report();
        report.adversarial_notes = String::new();
        assert!(validate_report(&report, PromptVariant::FullAch)
            .contains(&Violation::MissingAdversarialNotes));
        assert!(!validate_report(&report, PromptVariant::SimplifiedAch)
            .contains(&Violation::MissingAdversarialNotes));
    }

    #[test]
    fn shared_option_and_unlabeled_hypotheses_flagged() {
        let hypotheses = vec![
            Hypothesis::from_statement("H1", "first -> A"),
            Hypothesis::from_statement("H2", "also first -> A"),
            Hypothesis::from_statement("H3", "no label here"),
        ];
        let m = AchMatrix::new(
            vec!["H1".into(), "H2".into(), "H3".into()],
            vec!["E1".into()],
            vec![vec![C, I, N]],
        )
        .unwrap();
        let report = AchReport::new(
            hypotheses,
            vec![Evidence::new("E1", "fact", "query")],
            m,
            String::new(),
            "H1".into(),
            "notes".into(),
            "H1".into(),
            "A".into(),
            BTreeMap::new(),
            String::new(),
        )
        .unwrap();
        let violations = validate_report(&report, PromptVariant::FullAch);
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::NonExclusiveHypotheses { label, .. } if label == "A")));
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::UnlabeledHypothesis { id } if id == "H3")));
    }

    #[test]
    fn single_hypothesis_and_empty_pool_flagged() {
        let m = AchMatrix::new(vec!["H1".into()], vec![], vec![]).unwrap();
        let report = AchReport::new(
            vec![Hypothesis::from_statement("H1", "only -> A")],
            vec![],
            m,
            String::new(),
            "H1".into(),
            "notes".into(),
            "H1".into(),
            "A".into(),
            BTreeMap::new(),
            String::new(),
        )
        .unwrap();
        let violations = validate_report(&report, PromptVariant::FullAch);
        assert!(violations.contains(&Violation::SingleHypothesis));
        assert!(violations.contains(&Violation::EmptyEvidencePool));
    }
}
