use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::prompt::{is_heading_line, FULL_HEADINGS, SIMPLIFIED_HEADINGS};
use super::types::{AchMatrix, AchReport, CellMark, Evidence, Hypothesis, ReportError};
use crate::extract::OPTION_LETTERS;

/// The two tagged blocks of a well-formed decider response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionOutput {
    pub think: String,
    pub answer: String,
}

/// Tag-structure failures; scoring maps any of these to a zero format
/// reward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MalformedOutput {
    MissingBlock(&'static str),
    DuplicateBlock(&'static str),
    AnswerBeforeThink,
    InterleavedTags,
}

impl fmt::Display for MalformedOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MalformedOutput::MissingBlock(tag) => write!(f, "missing {tag} block"),
            MalformedOutput::DuplicateBlock(tag) => write!(f, "more than one {tag} block"),
            MalformedOutput::AnswerBeforeThink => write!(f, "answer block precedes think block"),
            MalformedOutput::InterleavedTags => write!(f, "think/answer tags are interleaved"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MalformedOutput {}

fn sole_index(raw: &str, needle: &str, tag: &'static str) -> Result<usize, MalformedOutput> {
    let mut found = raw.match_indices(needle).map(|(i, _)| i);
    let first = found.next().ok_or(MalformedOutput::MissingBlock(tag))?;
    if found.next().is_some() {
        return Err(MalformedOutput::DuplicateBlock(tag));
    }
    Ok(first)
}

/// Extract the think and answer blocks from raw decider output. Requires
/// exactly one of each, with the think block closed before the answer block
/// opens; content is whitespace-trimmed.
pub fn parse_decision_output(raw: &str) -> Result<DecisionOutput, MalformedOutput> {
    let think_open = sole_index(raw, "<think>", "think")?;
    let think_close = sole_index(raw, "</think>", "think")?;
    let answer_open = sole_index(raw, "<answer>", "answer")?;
    let answer_close = sole_index(raw, "</answer>", "answer")?;

    if answer_open < think_open {
        return Err(MalformedOutput::AnswerBeforeThink);
    }
    if !(think_open < think_close && think_close <= answer_open && answer_open < answer_close) {
        return Err(MalformedOutput::InterleavedTags);
    }

    Ok(DecisionOutput {
        think: raw[think_open + "<think>".len()..think_close].trim().to_string(),
        answer: raw[answer_open + "<answer>".len()..answer_close].trim().to_string(),
    })
}

/// Why a think block could not be read back as a structured report. Distinct
/// from [`MalformedOutput`]: the response format may be fine while the
/// reasoning structure is not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnparseableReport {
    NoHypotheses,
    NoMatrix,
    InvalidMark(String),
    RaggedGrid,
    UnknownHypothesis(String),
    UnknownEvidence(String),
    IncompleteGrid(String),
    NoDecision,
    Structural(ReportError),
}

impl fmt::Display for UnparseableReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnparseableReport::NoHypotheses => write!(f, "no hypothesis declarations found"),
            UnparseableReport::NoMatrix => write!(f, "no matrix grid found"),
            UnparseableReport::InvalidMark(cell) => write!(f, "unrecognized matrix mark {cell:?}"),
            UnparseableReport::RaggedGrid => write!(f, "matrix rows have inconsistent widths"),
            UnparseableReport::UnknownHypothesis(id) => {
                write!(f, "grid references undeclared hypothesis {id:?}")
            }
            UnparseableReport::UnknownEvidence(id) => {
                write!(f, "grid references undeclared evidence {id:?}")
            }
            UnparseableReport::IncompleteGrid(id) => {
                write!(f, "declared id {id:?} is missing from the grid")
            }
            UnparseableReport::NoDecision => write!(f, "no resolvable decision line"),
            UnparseableReport::Structural(e) => write!(f, "structurally invalid report: {e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for UnparseableReport {}

impl From<ReportError> for UnparseableReport {
    fn from(e: ReportError) -> Self {
        UnparseableReport::Structural(e)
    }
}

/// Section contents keyed by canonical heading name.
fn split_sections(think: &str) -> BTreeMap<&'static str, Vec<&str>> {
    let mut sections: BTreeMap<&'static str, Vec<&str>> = BTreeMap::new();
    let mut current: Option<&'static str> = None;
    for line in think.lines() {
        let heading = FULL_HEADINGS
            .iter()
            .chain(SIMPLIFIED_HEADINGS.iter())
            .find(|h| is_heading_line(line, h));
        if let Some(&h) = heading {
            current = Some(h);
            sections.entry(h).or_default();
        } else if let Some(h) = current {
            sections.get_mut(h).expect("section started").push(line);
        }
    }
    sections
}

fn section_text(sections: &BTreeMap<&'static str, Vec<&str>>, heading: &str) -> String {
    sections
        .get(heading)
        .map(|lines| lines.join("\n").trim().to_string())
        .unwrap_or_default()
}

/// True for tokens that can serve as hypothesis/evidence ids.
fn is_id_token(token: &str) -> bool {
    !token.is_empty()
        && token.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Parse `id: statement` lines, tolerating an optional `[source]` marker
/// between the id and the colon. Non-conforming lines are skipped.
fn parse_declarations(lines: &[&str]) -> Vec<(String, Option<String>, String)> {
    let mut out = Vec::new();
    for line in lines {
        let Some((left, right)) = line.split_once(':') else { continue };
        let statement = right.trim();
        if statement.is_empty() {
            continue;
        }
        let left = left.trim();
        let (id_part, source) = match (left.find('['), left.rfind(']')) {
            (Some(open), Some(close)) if open < close => (
                left[..open].trim(),
                Some(left[open + 1..close].trim().to_string()),
            ),
            _ => (left, None),
        };
        if is_id_token(id_part) {
            out.push((id_part.to_string(), source, statement.to_string()));
        }
    }
    out
}

/// A raw pipe-delimited grid: the first contiguous block of `|`-prefixed
/// lines, split into trimmed cells with markdown separator rows dropped.
fn find_grid(text: &str) -> Option<Vec<Vec<String>>> {
    let mut rows: Vec<Vec<String>> = Vec::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.starts_with('|') {
            let mut cells: Vec<&str> = trimmed.split('|').map(str::trim).collect();
            if cells.first() == Some(&"") {
                cells.remove(0);
            }
            if cells.last() == Some(&"") {
                cells.pop();
            }
            let separator = !cells.is_empty()
                && cells.iter().all(|c| !c.is_empty() && c.chars().all(|ch| matches!(ch, '-' | ':' | '=')));
            if !separator {
                rows.push(cells.iter().map(|c| c.to_string()).collect());
            }
        } else if !rows.is_empty() {
            break;
        }
    }
    (!rows.is_empty() && rows[0].len() >= 2).then_some(rows)
}

/// True when the text contains a rectangular pipe grid whose data cells are
/// all valid marks. Used by the protocol pattern reward; id resolution is
/// not required here.
pub fn has_parseable_grid(text: &str) -> bool {
    let Some(rows) = find_grid(text) else { return false };
    let width = rows[0].len();
    if rows.len() < 2 {
        return false;
    }
    rows[1..].iter().all(|row| {
        row.len() == width && row[1..].iter().all(|cell| CellMark::parse(cell).is_some())
    })
}

fn standalone_tokens(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '-'))
        .filter(|t| !t.is_empty())
}

/// Tolerant section-based parse of a think block into a structured report.
///
/// Headings are matched fuzzily (case, numbering, markdown markers); the
/// grid is strict: rectangular, valid marks, ids resolvable against the
/// declarations. Works on both the full and the simplified section layout;
/// when no evidence declarations exist the grid's row labels stand in as the
/// evidence pool. Absent review/adversarial sections yield empty text.
pub fn parse_ach_report(think: &str) -> Result<AchReport, UnparseableReport> {
    let sections = split_sections(think);

    let hypothesis_lines = sections
        .get(FULL_HEADINGS[0])
        .or_else(|| sections.get(SIMPLIFIED_HEADINGS[0]))
        .ok_or(UnparseableReport::NoHypotheses)?;
    let hypotheses: Vec<Hypothesis> = parse_declarations(hypothesis_lines)
        .into_iter()
        .map(|(id, _, statement)| Hypothesis::from_statement(id, statement))
        .collect();
    if hypotheses.is_empty() {
        return Err(UnparseableReport::NoHypotheses);
    }

    let declared_evidence: Option<Vec<Evidence>> = sections.get(FULL_HEADINGS[1]).map(|lines| {
        parse_declarations(lines)
            .into_iter()
            .map(|(id, source, statement)| {
                Evidence::new(id, statement, source.unwrap_or_else(|| "query".to_string()))
            })
            .collect()
    });

    // Grid: prefer the matrix section, fall back to scanning the whole text.
    let matrix_text = {
        let from_section = section_text(&sections, FULL_HEADINGS[2]);
        if !from_section.is_empty() {
            from_section
        } else {
            let simplified = section_text(&sections, SIMPLIFIED_HEADINGS[1]);
            if !simplified.is_empty() {
                simplified
            } else {
                think.to_string()
            }
        }
    };
    let grid = find_grid(&matrix_text).ok_or(UnparseableReport::NoMatrix)?;
    let width = grid[0].len();
    let grid_hypothesis_ids: Vec<String> = grid[0][1..].to_vec();
    let mut grid_rows: Vec<(String, Vec<CellMark>)> = Vec::new();
    for row in &grid[1..] {
        if row.len() != width {
            return Err(UnparseableReport::RaggedGrid);
        }
        let marks = row[1..]
            .iter()
            .map(|cell| {
                CellMark::parse(cell).ok_or_else(|| UnparseableReport::InvalidMark(cell.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        grid_rows.push((row[0].clone(), marks));
    }

    // Resolve hypothesis columns against declarations.
    let mut column_of: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, id) in grid_hypothesis_ids.iter().enumerate() {
        if !hypotheses.iter().any(|h| h.id == *id) {
            return Err(UnparseableReport::UnknownHypothesis(id.clone()));
        }
        column_of.insert(id.as_str(), i);
    }
    for h in &hypotheses {
        if !column_of.contains_key(h.id.as_str()) {
            return Err(UnparseableReport::IncompleteGrid(h.id.clone()));
        }
    }

    // Resolve evidence rows: against declarations when present, otherwise
    // the rows themselves define the pool.
    let evidence: Vec<Evidence> = match declared_evidence {
        Some(declared) if !declared.is_empty() => {
            for (row_id, _) in &grid_rows {
                if !declared.iter().any(|e| e.id == *row_id) {
                    return Err(UnparseableReport::UnknownEvidence(row_id.clone()));
                }
            }
            for e in &declared {
                if !grid_rows.iter().any(|(row_id, _)| *row_id == e.id) {
                    return Err(UnparseableReport::IncompleteGrid(e.id.clone()));
                }
            }
            declared
        }
        _ => grid_rows
            .iter()
            .map(|(id, _)| Evidence::new(id.clone(), id.clone(), "query"))
            .collect(),
    };
    if grid_rows.len() != evidence.len() {
        // Duplicate row labels collapse here.
        return Err(UnparseableReport::RaggedGrid);
    }

    // Reorder cells to declaration order.
    let mut cells: Vec<Vec<CellMark>> = Vec::with_capacity(evidence.len());
    for e in &evidence {
        let (_, marks) = grid_rows
            .iter()
            .find(|(row_id, _)| *row_id == e.id)
            .expect("resolved above");
        let row: Vec<CellMark> = hypotheses
            .iter()
            .map(|h| marks[column_of[h.id.as_str()]])
            .collect();
        cells.push(row);
    }
    let matrix = AchMatrix::new(
        hypotheses.iter().map(|h| h.id.clone()).collect(),
        evidence.iter().map(|e| e.id.clone()).collect(),
        cells,
    )?;

    // Decision line from the report/conclusion section.
    let report_text = {
        let full = section_text(&sections, FULL_HEADINGS[6]);
        if full.is_empty() {
            section_text(&sections, SIMPLIFIED_HEADINGS[2])
        } else {
            full
        }
    };
    let mut final_decision: Option<String> = None;
    let mut final_answer: Option<String> = None;
    let mut rejection_rationale: BTreeMap<String, String> = BTreeMap::new();
    let mut confidence_assessment = String::new();
    for line in report_text.lines() {
        let key = line
            .trim_start_matches(|c: char| !c.is_ascii_alphanumeric())
            .to_lowercase();
        if key.starts_with("decision") && final_decision.is_none() {
            if let Some((_, rest)) = line.split_once(':') {
                let mut tokens = standalone_tokens(rest);
                if let Some(id) = tokens.find(|t| hypotheses.iter().any(|h| h.id == *t)) {
                    final_decision = Some(id.to_string());
                    final_answer = tokens
                        .map(|t| t.to_uppercase())
                        .find(|t| t.len() == 1 && OPTION_LETTERS.contains(t.as_str()));
                }
            }
        } else if key.starts_with("rejected") {
            if let Some((left, rest)) = line.split_once(':') {
                if let Some(id) = standalone_tokens(left)
                    .find(|t| hypotheses.iter().any(|h| h.id == *t))
                {
                    rejection_rationale.insert(id.to_string(), rest.trim().to_string());
                }
            }
        } else if key.starts_with("confidence") && confidence_assessment.is_empty() {
            if let Some((_, rest)) = line.split_once(':') {
                confidence_assessment = rest.trim().to_string();
            }
        }
    }
    let final_decision = final_decision.ok_or(UnparseableReport::NoDecision)?;
    let final_answer = match final_answer {
        Some(a) => a,
        None => hypotheses
            .iter()
            .find(|h| h.id == final_decision)
            .and_then(|h| h.covered_options.iter().next().cloned())
            .ok_or(UnparseableReport::NoDecision)?,
    };

    // Tentative selection: first declared id named in the falsification
    // section; the final decision stands in when the section is absent.
    let falsification_text = section_text(&sections, FULL_HEADINGS[4]);
    let tentative_selection = standalone_tokens(&falsification_text)
        .find(|t| hypotheses.iter().any(|h| h.id == *t))
        .map(|t| t.to_string())
        .unwrap_or_else(|| final_decision.clone());

    let review_notes = section_text(&sections, FULL_HEADINGS[3]);
    let adversarial_notes = section_text(&sections, FULL_HEADINGS[5]);

    Ok(AchReport::new(
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
    )?)
}
