//! Option-label extraction from free-form agent text.
//!
//! Accuracy scoring and ballot construction must agree on what counts as an
//! answer, so the normalization lives here as the single source of truth:
//! answer blocks are reduced to their first standalone option letter, and
//! untagged text is scanned for the last standalone letter that names one of
//! the live options.

use alloc::string::String;
use alloc::vec::Vec;

/// The full option alphabet. Items use a prefix of it (2 to 10 options).
pub const OPTION_LETTERS: &str = "ABCDEFGHIJ";

fn is_option_letter(token: &str) -> bool {
    token.len() == 1 && OPTION_LETTERS.contains(token)
}

/// Standalone single-letter tokens of `text`, uppercased. A token is a
/// maximal run of ASCII alphanumerics, so `(b).` yields `B` and `ANSWER`
/// yields nothing.
fn option_tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_uppercase())
        .filter(|t| is_option_letter(t))
}

/// Normalize an answer block to an option letter: trim, uppercase, ignore
/// surrounding parentheses and periods, take the first standalone option
/// token. `None` when the block names no option letter.
pub fn normalize_answer(block: &str) -> Option<String> {
    option_tokens(block.trim()).next()
}

const ANSWER_OPEN: &str = "<answer>";
const ANSWER_CLOSE: &str = "</answer>";

/// Content of the first `<answer>` block, if the text has one.
pub fn answer_block(text: &str) -> Option<&str> {
    let start = text.find(ANSWER_OPEN)? + ANSWER_OPEN.len();
    let end = start + text[start..].find(ANSWER_CLOSE)?;
    Some(text[start..end].trim())
}

/// Extract the chosen option from agent output.
///
/// When the text carries an `<answer>` block, its content is normalized like
/// an accuracy-scored answer and accepted only if it names a live option.
/// Otherwise the last standalone token naming a live option wins, so
/// trailing verdicts ("... the answer is (b)") beat earlier mentions.
pub fn extract_choice(text: &str, options: &[&str]) -> Option<String> {
    if options.is_empty() {
        return None;
    }
    if let Some(block) = answer_block(text) {
        let label = normalize_answer(block)?;
        return options.contains(&label.as_str()).then_some(label);
    }
    option_tokens(text)
        .filter(|t| options.contains(&t.as_str()))
        .last()
}

/// Parse a `Ranking: X > Y > Z` line into an ordered ballot.
///
/// The last ranking line in the text wins. Separators may be `>` or `,`.
/// Unknown labels are dropped, as is any label repeated after its first
/// occurrence. Returns `None` when no ranking line yields at least one valid
/// label.
pub fn extract_ranking(text: &str, options: &[&str]) -> Option<Vec<String>> {
    let candidates: Vec<&str> = text
        .lines()
        .filter_map(|l| {
            let stripped = l.trim_start_matches(|c: char| !c.is_ascii_alphanumeric());
            let lower = stripped.to_lowercase();
            lower
                .starts_with("ranking")
                .then(|| stripped.split_once(':').map(|(_, rest)| rest))
                .flatten()
        })
        .collect();

    for line in candidates.into_iter().rev() {
        let mut ranking: Vec<String> = Vec::new();
        for part in line.split(['>', ',']) {
            if let Some(label) = normalize_answer(part) {
                if options.contains(&label.as_str()) && !ranking.contains(&label) {
                    ranking.push(label);
                }
            }
        }
        if !ranking.is_empty() {
            return Some(ranking);
        }
    }
    None
}
