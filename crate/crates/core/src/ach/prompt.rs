use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// Decision-prompt flavor. Full scaffolding spells out all seven protocol
/// stages, the simplified form keeps only the falsification core, and the
/// unstructured form just asks for a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PromptVariant {
    #[serde(rename = "FullACH")]
    FullAch,
    #[serde(rename = "SimplifiedACH")]
    SimplifiedAch,
    Unstructured,
}

impl fmt::Display for PromptVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PromptVariant::FullAch => "FullACH",
            PromptVariant::SimplifiedAch => "SimplifiedACH",
            PromptVariant::Unstructured => "Unstructured",
        })
    }
}

/// The seven full-protocol section headings, in stage order.
pub const FULL_HEADINGS: [&str; 7] = [
    "Hypothesis Space",
    "Evidence Pool",
    "Hypothesis-Evidence Matrix",
    "Meta-Cognitive Review",
    "Falsification Selection",
    "Adversarial Testing",
    "Analytical Report",
];

/// The condensed three-section headings.
pub const SIMPLIFIED_HEADINGS: [&str; 3] = ["Hypotheses", "Matrix", "Conclusion"];

/// Canonical description of the full protocol: the heading script embedded
/// in the full prompt, and the reference text that stage-2 soft scoring
/// measures think blocks against.
pub const PROTOCOL_REFERENCE: &str = include_str!("../../templates/protocol_reference.txt");

pub const FULL_ACH_TEMPLATE: &str = include_str!("../../templates/full_ach.txt");
pub const SIMPLIFIED_ACH_TEMPLATE: &str = include_str!("../../templates/simplified_ach.txt");
pub const UNSTRUCTURED_TEMPLATE: &str = include_str!("../../templates/unstructured.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PromptError {
    EmptyCandidates,
    EmptyQuery,
}

impl fmt::Display for PromptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PromptError::EmptyCandidates => write!(f, "decision prompts need at least one candidate answer"),
            PromptError::EmptyQuery => write!(f, "decision prompts need a non-empty query"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for PromptError {}

/// Substitute `{{protocol}}`, `{{query}}` and `{{candidates}}` placeholders.
/// The protocol expansion runs first so placeholder-like text inside the
/// query or candidate answers is never expanded.
pub fn render_template(template: &str, query: &str, candidates: &[(&str, &str)]) -> String {
    let block = candidates
        .iter()
        .map(|(id, answer)| alloc::format!("[{id}]\n{answer}"))
        .collect::<Vec<_>>()
        .join("\n\n");
    template
        .replace("{{protocol}}", PROTOCOL_REFERENCE)
        .replace("{{query}}", query)
        .replace("{{candidates}}", &block)
}

/// Render the decision-phase prompt for the given variant, embedding the
/// verbatim query and every candidate answer with its agent id.
pub fn render_decision_prompt(
    query: &str,
    candidates: &[(&str, &str)],
    variant: PromptVariant,
) -> Result<String, PromptError> {
    if query.trim().is_empty() {
        return Err(PromptError::EmptyQuery);
    }
    if candidates.is_empty() {
        return Err(PromptError::EmptyCandidates);
    }
    let template = match variant {
        PromptVariant::FullAch => FULL_ACH_TEMPLATE,
        PromptVariant::SimplifiedAch => SIMPLIFIED_ACH_TEMPLATE,
        PromptVariant::Unstructured => UNSTRUCTURED_TEMPLATE,
    };
    Ok(render_template(template, query, candidates))
}

/// Normalize a line for heading comparison: strip leading markdown markers
/// and numbering, strip a trailing colon, lowercase.
fn normalized_heading(line: &str) -> String {
    let stripped = line
        .trim()
        .trim_start_matches(|c: char| {
            c.is_ascii_digit() || matches!(c, '#' | '*' | '-' | '.' | ')' | '(' | ' ' | '\t')
        })
        .trim_end_matches([':', '*', ' ', '\t']);
    stripped.to_lowercase()
}

/// True when the line reads as the given section heading (case-insensitive,
/// numbering and markdown markers tolerated).
pub(crate) fn is_heading_line(line: &str, heading: &str) -> bool {
    normalized_heading(line) == heading.to_lowercase()
}

/// Number of lines in `text` that read as the given heading.
pub fn heading_line_count(text: &str, heading: &str) -> usize {
    text.lines().filter(|l| is_heading_line(l, heading)).count()
}
