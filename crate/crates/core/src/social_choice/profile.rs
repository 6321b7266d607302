use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// One of the alternatives under vote; for MCQA runs the label is an option
/// letter ("A".."J"), but any non-empty token works.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Candidate {
    pub label: String,
}

impl Candidate {
    pub fn new(label: impl Into<String>) -> Self {
        Self { label: label.into() }
    }
}

/// A single voter's preference. Ranked ballots may be truncated; candidates
/// left off a ballot rank below every listed one and score zero.
///
/// On the wire a ranked ballot is a JSON array of labels and a cardinal
/// ballot is a label→score map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ballot {
    Ranked(Vec<String>),
    Cardinal(BTreeMap<String, u32>),
}

impl Ballot {
    pub fn is_ranked(&self) -> bool {
        matches!(self, Ballot::Ranked(_))
    }

    pub fn ranked(labels: &[&str]) -> Self {
        Ballot::Ranked(labels.iter().map(|l| l.to_string()).collect())
    }

    pub fn cardinal(scores: &[(&str, u32)]) -> Self {
        Ballot::Cardinal(scores.iter().map(|(l, s)| (l.to_string(), *s)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProfileError {
    TooFewCandidates(usize),
    EmptyCandidateLabel,
    DuplicateCandidate(String),
    NoBallots,
    MixedBallotKinds,
    EmptyRanking,
    DuplicateRankingEntry(String),
    UnknownCandidate(String),
    ScoreOutOfRange { label: String, score: u32, max: u32 },
}

impl fmt::Display for ProfileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileError::TooFewCandidates(n) => {
                write!(f, "a profile needs at least 2 candidates, got {n}")
            }
            ProfileError::EmptyCandidateLabel => write!(f, "candidate labels must be non-empty"),
            ProfileError::DuplicateCandidate(l) => write!(f, "duplicate candidate label {l:?}"),
            ProfileError::NoBallots => write!(f, "a profile needs at least one ballot"),
            ProfileError::MixedBallotKinds => {
                write!(f, "all ballots in a profile must share one kind")
            }
            ProfileError::EmptyRanking => write!(f, "ranked ballots need at least one entry"),
            ProfileError::DuplicateRankingEntry(l) => {
                write!(f, "ballot ranks candidate {l:?} more than once")
            }
            ProfileError::UnknownCandidate(l) => {
                write!(f, "ballot references unknown candidate {l:?}")
            }
            ProfileError::ScoreOutOfRange { label, score, max } => {
                write!(f, "score {score} for {label:?} exceeds the scale maximum {max}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ProfileError {}

/// A validated election: candidate set, ballots of one kind, and the cardinal
/// scale ceiling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile")]
pub struct Profile {
    candidates: Vec<Candidate>,
    ballots: Vec<Ballot>,
    score_max: u32,
}

/// Default cardinal scale: integer scores 0..=10.
pub const DEFAULT_SCORE_MAX: u32 = 10;

#[derive(Deserialize)]
struct RawProfile {
    candidates: Vec<Candidate>,
    ballots: Vec<Ballot>,
    #[serde(default = "default_score_max")]
    score_max: u32,
}

fn default_score_max() -> u32 {
    DEFAULT_SCORE_MAX
}

impl TryFrom<RawProfile> for Profile {
    type Error = ProfileError;

    fn try_from(raw: RawProfile) -> Result<Self, Self::Error> {
        Profile::new(raw.candidates, raw.ballots, raw.score_max)
    }
}

impl Profile {
    pub fn new(
        candidates: Vec<Candidate>,
        ballots: Vec<Ballot>,
        score_max: u32,
    ) -> Result<Self, ProfileError> {
        if candidates.len() < 2 {
            return Err(ProfileError::TooFewCandidates(candidates.len()));
        }
        let mut seen = BTreeSet::new();
        for c in &candidates {
            if c.label.is_empty() {
                return Err(ProfileError::EmptyCandidateLabel);
            }
            if !seen.insert(c.label.as_str()) {
                return Err(ProfileError::DuplicateCandidate(c.label.clone()));
            }
        }
        if ballots.is_empty() {
            return Err(ProfileError::NoBallots);
        }
        let first_kind = ballots[0].is_ranked();
        for ballot in &ballots {
            if ballot.is_ranked() != first_kind {
                return Err(ProfileError::MixedBallotKinds);
            }
            match ballot {
                Ballot::Ranked(ranking) => {
                    if ranking.is_empty() {
                        return Err(ProfileError::EmptyRanking);
                    }
                    let mut on_ballot = BTreeSet::new();
                    for label in ranking {
                        if !seen.contains(label.as_str()) {
                            return Err(ProfileError::UnknownCandidate(label.clone()));
                        }
                        if !on_ballot.insert(label.as_str()) {
                            return Err(ProfileError::DuplicateRankingEntry(label.clone()));
                        }
                    }
                }
                Ballot::Cardinal(scores) => {
                    for (label, score) in scores {
                        if !seen.contains(label.as_str()) {
                            return Err(ProfileError::UnknownCandidate(label.clone()));
                        }
                        if *score > score_max {
                            return Err(ProfileError::ScoreOutOfRange {
                                label: label.clone(),
                                score: *score,
                                max: score_max,
                            });
                        }
                    }
                }
            }
        }
        Ok(Self { candidates, ballots, score_max })
    }

    /// Convenience constructor for ranked elections over string labels.
    pub fn from_rankings(labels: &[&str], rankings: &[&[&str]]) -> Result<Self, ProfileError> {
        Self::new(
            labels.iter().map(|l| Candidate::new(*l)).collect(),
            rankings.iter().map(|r| Ballot::ranked(r)).collect(),
            DEFAULT_SCORE_MAX,
        )
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.candidates.iter().map(|c| c.label.as_str())
    }

    pub fn ballots(&self) -> &[Ballot] {
        &self.ballots
    }

    pub fn score_max(&self) -> u32 {
        self.score_max
    }

    pub fn is_ranked(&self) -> bool {
        self.ballots[0].is_ranked()
    }

    pub(crate) fn candidate_index(&self) -> BTreeMap<&str, usize> {
        self.candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (c.label.as_str(), i))
            .collect()
    }
}
