//! Structured decision protocol based on competing-hypotheses analysis.
//!
//! The decider agent is prompted to work through an explicit sequence of
//! stages inside its think block: enumerate a mutually exclusive hypothesis
//! space, pool the evidence, cross-rate every evidence/hypothesis pair in a
//! matrix, audit the matrix for bias, tentatively select the hypothesis with
//! the least disconfirming evidence, stress-test that selection, and close
//! with an analytical report. This module renders those prompts, parses the
//! resulting think text back into an [`AchReport`], re-runs the
//! falsification selection mechanically, and audits reports for protocol
//! violations.

mod audit;
mod parse;
mod prompt;
mod types;

pub use audit::{falsification_select, validate_report, Violation};
pub use parse::{
    has_parseable_grid, parse_ach_report, parse_decision_output, DecisionOutput, MalformedOutput,
    UnparseableReport,
};
pub use prompt::{
    heading_line_count, render_decision_prompt, render_template, PromptError, PromptVariant,
    FULL_ACH_TEMPLATE, FULL_HEADINGS, PROTOCOL_REFERENCE, SIMPLIFIED_ACH_TEMPLATE,
    SIMPLIFIED_HEADINGS, UNSTRUCTURED_TEMPLATE,
};
pub use types::{AchMatrix, AchReport, CellMark, Evidence, Hypothesis, ReportError};
