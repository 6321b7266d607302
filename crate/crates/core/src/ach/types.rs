use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

/// One competing explanation of the query. The statement names the option
/// label(s) it asserts with an arrow suffix (`-> A`), from which
/// `covered_options` is derived; a hypothesis without an arrow keeps an
/// empty set and is flagged by the compliance audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub id: String,
    pub statement: String,
    pub covered_options: BTreeSet<String>,
}

impl Hypothesis {
    /// Build a hypothesis, deriving the covered options from the statement's
    /// arrow suffix.
    pub fn from_statement(id: impl Into<String>, statement: impl Into<String>) -> Self {
        let statement = statement.into();
        let covered_options = covered_options_from_statement(&statement);
        Self { id: id.into(), statement, covered_options }
    }
}

/// Option labels named after the last `->`/`→` arrow in a statement:
/// leading single-letter tokens, stopping at the first non-label token.
pub(crate) fn covered_options_from_statement(statement: &str) -> BTreeSet<String> {
    let tail = match (statement.rfind("->"), statement.rfind('→')) {
        (Some(a), Some(b)) => &statement[a.max(b)..],
        (Some(a), None) => &statement[a..],
        (None, Some(b)) => &statement[b..],
        (None, None) => return BTreeSet::new(),
    };
    let tail = tail.trim_start_matches(['-', '>', '→'].as_slice());
    let mut covered = BTreeSet::new();
    for token in tail
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|t| !t.is_empty())
    {
        let upper = token.to_uppercase();
        if upper.len() == 1 && crate::extract::OPTION_LETTERS.contains(&upper) {
            covered.insert(upper);
        } else {
            break;
        }
    }
    covered
}

/// One fact or argument in the shared pool, with its provenance (an agent id
/// or `"query"`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub id: String,
    pub statement: String,
    pub source: String,
}

impl Evidence {
    pub fn new(
        id: impl Into<String>,
        statement: impl Into<String>,
        source: impl Into<String>,
    ) -> Self {
        Self { id: id.into(), statement: statement.into(), source: source.into() }
    }
}

/// Diagnostic rating of one piece of evidence against one hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellMark {
    Consistent,
    Inconsistent,
    Irrelevant,
}

impl CellMark {
    /// Single-letter wire form: C / I / N.
    pub fn letter(self) -> char {
        match self {
            CellMark::Consistent => 'C',
            CellMark::Inconsistent => 'I',
            CellMark::Irrelevant => 'N',
        }
    }

    /// Accepts the letter abbreviations or the full words, case-insensitive.
    pub fn parse(text: &str) -> Option<Self> {
        match text.trim().to_lowercase().as_str() {
            "c" | "consistent" => Some(CellMark::Consistent),
            "i" | "inconsistent" => Some(CellMark::Inconsistent),
            "n" | "irrelevant" => Some(CellMark::Irrelevant),
            _ => None,
        }
    }
}

/// Complete evidence x hypothesis grid of marks. Row order follows
/// `evidence_ids`, column order follows `hypothesis_ids`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct AchMatrix {
    hypothesis_ids: Vec<String>,
    evidence_ids: Vec<String>,
    cells: Vec<Vec<CellMark>>,
}

#[derive(Deserialize)]
struct RawMatrix {
    hypothesis_ids: Vec<String>,
    evidence_ids: Vec<String>,
    cells: Vec<Vec<CellMark>>,
}

impl TryFrom<RawMatrix> for AchMatrix {
    type Error = ReportError;

    fn try_from(raw: RawMatrix) -> Result<Self, Self::Error> {
        AchMatrix::new(raw.hypothesis_ids, raw.evidence_ids, raw.cells)
    }
}

impl AchMatrix {
    pub fn new(
        hypothesis_ids: Vec<String>,
        evidence_ids: Vec<String>,
        cells: Vec<Vec<CellMark>>,
    ) -> Result<Self, ReportError> {
        if hypothesis_ids.is_empty() {
            return Err(ReportError::NoHypotheses);
        }
        let mut seen = BTreeSet::new();
        for id in &hypothesis_ids {
            if !seen.insert(id.as_str()) {
                return Err(ReportError::DuplicateId(id.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for id in &evidence_ids {
            if !seen.insert(id.as_str()) {
                return Err(ReportError::DuplicateId(id.clone()));
            }
        }
        if cells.len() != evidence_ids.len()
            || cells.iter().any(|row| row.len() != hypothesis_ids.len())
        {
            return Err(ReportError::IncompleteMatrix);
        }
        Ok(Self { hypothesis_ids, evidence_ids, cells })
    }

    pub fn hypothesis_ids(&self) -> &[String] {
        &self.hypothesis_ids
    }

    pub fn evidence_ids(&self) -> &[String] {
        &self.evidence_ids
    }

    pub fn mark(&self, evidence_idx: usize, hypothesis_idx: usize) -> CellMark {
        self.cells[evidence_idx][hypothesis_idx]
    }

    /// Marks of one hypothesis column, in evidence order.
    pub fn column(&self, hypothesis_idx: usize) -> impl Iterator<Item = CellMark> + '_ {
        self.cells.iter().map(move |row| row[hypothesis_idx])
    }
}

/// Structural problems detected when assembling a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReportError {
    NoHypotheses,
    DuplicateId(String),
    EmptyStatement(String),
    IncompleteMatrix,
    /// Matrix ids must match the declared hypothesis/evidence lists in order.
    MatrixIdMismatch,
    UnknownHypothesis(String),
    /// The final answer is not among the options the selected hypothesis
    /// asserts.
    AnswerNotCovered { hypothesis: String, answer: String },
}

impl fmt::Display for ReportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportError::NoHypotheses => write!(f, "a report needs at least one hypothesis"),
            ReportError::DuplicateId(id) => write!(f, "duplicate id {id:?}"),
            ReportError::EmptyStatement(id) => write!(f, "empty statement for {id:?}"),
            ReportError::IncompleteMatrix => {
                write!(f, "matrix must cover every evidence/hypothesis pair exactly once")
            }
            ReportError::MatrixIdMismatch => {
                write!(f, "matrix ids do not match the declared hypothesis/evidence lists")
            }
            ReportError::UnknownHypothesis(id) => {
                write!(f, "reference to undeclared hypothesis {id:?}")
            }
            ReportError::AnswerNotCovered { hypothesis, answer } => {
                write!(f, "final answer {answer:?} is not asserted by hypothesis {hypothesis:?}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ReportError {}

/// Parsed structured-reasoning artifact: the full record of one protocol
/// run, suitable for JSON logging and offline audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawReport")]
pub struct AchReport {
    pub hypotheses: Vec<Hypothesis>,
    pub evidence: Vec<Evidence>,
    pub matrix: AchMatrix,
    pub review_notes: String,
    pub tentative_selection: String,
    pub adversarial_notes: String,
    pub final_decision: String,
    pub final_answer: String,
    pub rejection_rationale: BTreeMap<String, String>,
    pub confidence_assessment: String,
}

#[derive(Deserialize)]
struct RawReport {
    hypotheses: Vec<Hypothesis>,
    evidence: Vec<Evidence>,
    matrix: AchMatrix,
    review_notes: String,
    tentative_selection: String,
    adversarial_notes: String,
    final_decision: String,
    final_answer: String,
    rejection_rationale: BTreeMap<String, String>,
    confidence_assessment: String,
}

impl TryFrom<RawReport> for AchReport {
    type Error = ReportError;

    fn try_from(raw: RawReport) -> Result<Self, Self::Error> {
        AchReport::new(
            raw.hypotheses,
            raw.evidence,
            raw.matrix,
            raw.review_notes,
            raw.tentative_selection,
            raw.adversarial_notes,
            raw.final_decision,
            raw.final_answer,
            raw.rejection_rationale,
            raw.confidence_assessment,
        )
    }
}

impl AchReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        hypotheses: Vec<Hypothesis>,
        evidence: Vec<Evidence>,
        matrix: AchMatrix,
        review_notes: String,
        tentative_selection: String,
        adversarial_notes: String,
        final_decision: String,
        final_answer: String,
        rejection_rationale: BTreeMap<String, String>,
        confidence_assessment: String,
    ) -> Result<Self, ReportError> {
        if hypotheses.is_empty() {
            return Err(ReportError::NoHypotheses);
        }
        let mut hypothesis_ids = BTreeSet::new();
        for h in &hypotheses {
            if h.statement.is_empty() {
                return Err(ReportError::EmptyStatement(h.id.clone()));
            }
            if !hypothesis_ids.insert(h.id.as_str()) {
                return Err(ReportError::DuplicateId(h.id.clone()));
            }
        }
        let mut evidence_ids = BTreeSet::new();
        for e in &evidence {
            if e.statement.is_empty() {
                return Err(ReportError::EmptyStatement(e.id.clone()));
            }
            if !evidence_ids.insert(e.id.as_str()) {
                return Err(ReportError::DuplicateId(e.id.clone()));
            }
        }
        let ids_match = matrix.hypothesis_ids().len() == hypotheses.len()
            && matrix
                .hypothesis_ids()
                .iter()
                .zip(&hypotheses)
                .all(|(id, h)| *id == h.id)
            && matrix.evidence_ids().len() == evidence.len()
            && matrix
                .evidence_ids()
                .iter()
                .zip(&evidence)
                .all(|(id, e)| *id == e.id);
        if !ids_match {
            return Err(ReportError::MatrixIdMismatch);
        }
        for selected in [&tentative_selection, &final_decision] {
            if !hypothesis_ids.contains(selected.as_str()) {
                return Err(ReportError::UnknownHypothesis(selected.clone()));
            }
        }
        for id in rejection_rationale.keys() {
            if !hypothesis_ids.contains(id.as_str()) {
                return Err(ReportError::UnknownHypothesis(id.clone()));
            }
        }
        let chosen = hypotheses
            .iter()
            .find(|h| h.id == final_decision)
            .expect("validated above");
        if !chosen.covered_options.is_empty() && !chosen.covered_options.contains(&final_answer) {
            return Err(ReportError::AnswerNotCovered {
                hypothesis: final_decision.clone(),
                answer: final_answer.clone(),
            });
        }
        Ok(Self {
            hypotheses,
            evidence,
            matrix,
            review_notes,
            tentative_selection,
            adversarial_notes,
            final_decision,
            final_answer,
            rejection_rationale,
            confidence_assessment,
        })
    }

    pub fn hypothesis(&self, id: &str) -> Option<&Hypothesis> {
        self.hypotheses.iter().find(|h| h.id == id)
    }

    /// Canonical think-block rendering of the report. Parsing this text with
    /// [`super::parse_ach_report`] reproduces the report exactly, and the
    /// rendering satisfies the full protocol pattern check (all seven
    /// headings plus a well-formed grid).
    pub fn to_think_text(&self) -> String {
        let mut out = String::new();

        out.push_str("Hypothesis Space\n");
        for h in &self.hypotheses {
            let _ = writeln!(out, "{}: {}", h.id, h.statement);
        }

        out.push_str("\nEvidence Pool\n");
        for e in &self.evidence {
            let _ = writeln!(out, "{} [{}]: {}", e.id, e.source, e.statement);
        }

        out.push_str("\nHypothesis-Evidence Matrix\n");
        let _ = writeln!(
            out,
            "| Evidence | {} |",
            self.matrix.hypothesis_ids().join(" | ")
        );
        for (row, e_id) in self.matrix.evidence_ids().iter().enumerate() {
            let marks: Vec<String> = (0..self.matrix.hypothesis_ids().len())
                .map(|col| self.matrix.mark(row, col).letter().to_string())
                .collect();
            let _ = writeln!(out, "| {} | {} |", e_id, marks.join(" | "));
        }

        out.push_str("\nMeta-Cognitive Review\n");
        if !self.review_notes.is_empty() {
            out.push_str(&self.review_notes);
            out.push('\n');
        }

        out.push_str("\nFalsification Selection\n");
        let _ = writeln!(out, "Tentative selection: {}", self.tentative_selection);

        out.push_str("\nAdversarial Testing\n");
        if !self.adversarial_notes.is_empty() {
            out.push_str(&self.adversarial_notes);
            out.push('\n');
        }

        out.push_str("\nAnalytical Report\n");
        let _ = writeln!(out, "Decision: {} -> {}", self.final_decision, self.final_answer);
        for (id, rationale) in &self.rejection_rationale {
            let _ = writeln!(out, "Rejected {id}: {rationale}");
        }
        if !self.confidence_assessment.is_empty() {
            let _ = writeln!(out, "Confidence: {}", self.confidence_assessment);
        }
        out
    }
}
