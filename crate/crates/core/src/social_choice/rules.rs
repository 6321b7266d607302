use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::profile::{Ballot, Profile};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleError {
    /// The rule needs ranked ballots but the profile is cardinal.
    CardinalProfile,
    /// The rule needs cardinal ballots but the profile is ranked.
    RankedProfile,
    ScoreOutOfRange { label: String, score: u32, max: u32 },
}

impl fmt::Display for RuleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleError::CardinalProfile => write!(f, "rule requires ranked ballots"),
            RuleError::RankedProfile => write!(f, "rule requires cardinal ballots"),
            RuleError::ScoreOutOfRange { label, score, max } => {
                write!(f, "score {score} for {label:?} exceeds the scale maximum {max}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for RuleError {}

/// Head-to-head counts: `count(i, j)` ballots rank candidate `i` strictly
/// above candidate `j`. A candidate absent from a truncated ballot ranks
/// below every present one; two absent candidates are not compared.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairwiseMatrix {
    labels: Vec<String>,
    counts: Vec<Vec<u32>>,
}

impl PairwiseMatrix {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn count(&self, above: usize, below: usize) -> u32 {
        self.counts[above][below]
    }

    pub fn count_by_label(&self, above: &str, below: &str) -> Option<u32> {
        let a = self.labels.iter().position(|l| l == above)?;
        let b = self.labels.iter().position(|l| l == below)?;
        Some(self.counts[a][b])
    }

    /// Signed margin of `i` over `j`.
    pub fn margin(&self, i: usize, j: usize) -> i64 {
        i64::from(self.counts[i][j]) - i64::from(self.counts[j][i])
    }
}

pub fn pairwise_matrix(profile: &Profile) -> Result<PairwiseMatrix, RuleError> {
    if !profile.is_ranked() {
        return Err(RuleError::CardinalProfile);
    }
    let index = profile.candidate_index();
    let m = index.len();
    let mut counts = vec![vec![0u32; m]; m];
    for ballot in profile.ballots() {
        let Ballot::Ranked(ranking) = ballot else { unreachable!() };
        let mut rank: Vec<Option<usize>> = vec![None; m];
        for (pos, label) in ranking.iter().enumerate() {
            rank[index[label.as_str()]] = Some(pos);
        }
        for i in 0..m {
            for j in (i + 1)..m {
                match (rank[i], rank[j]) {
                    (Some(a), Some(b)) if a < b => counts[i][j] += 1,
                    (Some(_), Some(_)) => counts[j][i] += 1,
                    (Some(_), None) => counts[i][j] += 1,
                    (None, Some(_)) => counts[j][i] += 1,
                    (None, None) => {}
                }
            }
        }
    }
    Ok(PairwiseMatrix {
        labels: profile.labels().map(String::from).collect(),
        counts,
    })
}

/// The candidate beating every other head-to-head, when one exists.
pub fn condorcet_winner(matrix: &PairwiseMatrix) -> Option<&str> {
    let m = matrix.labels.len();
    (0..m)
        .find(|&i| (0..m).all(|j| j == i || matrix.counts[i][j] > matrix.counts[j][i]))
        .map(|i| matrix.labels[i].as_str())
}

/// Outcome of one rule application.
///
/// `tally` maps every candidate to the score the rule judged it by; the
/// direction (higher-wins or, for minimax, lower-wins) is documented on each
/// rule. `tiebreak_applied` is true whenever the lexicographic tie-break was
/// consulted anywhere in the run, so label-permutation equivariance holds
/// exactly when it is false.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteResult {
    pub winner: String,
    pub tally: BTreeMap<String, i64>,
    pub tiebreak_applied: bool,
    pub trace: Vec<String>,
}

/// Winner under max (or min) tally with lexicographic tie-break; the bool
/// reports whether the top was tied. Relies on BTreeMap iterating in label
/// order.
fn pick_best(tally: &BTreeMap<String, i64>, minimize: bool) -> (String, bool) {
    let mut best: Option<(&str, i64)> = None;
    let mut tied = false;
    for (label, &score) in tally {
        match best {
            None => best = Some((label, score)),
            Some((_, incumbent)) => {
                let better = if minimize { score < incumbent } else { score > incumbent };
                if better {
                    best = Some((label, score));
                    tied = false;
                } else if score == incumbent {
                    tied = true;
                }
            }
        }
    }
    let (label, _) = best.expect("profiles always have candidates");
    (label.to_string(), tied)
}

fn tie_trace(trace: &mut Vec<String>, tally: &BTreeMap<String, i64>, winner: &str) {
    let top = tally[winner];
    let tied: Vec<&str> = tally
        .iter()
        .filter(|(_, &s)| s == top)
        .map(|(l, _)| l.as_str())
        .collect();
    trace.push(format!(
        "tie among {{{}}}; selecting {} by label order",
        tied.join(", "),
        winner
    ));
}

fn require_ranked(profile: &Profile) -> Result<(), RuleError> {
    if profile.is_ranked() {
        Ok(())
    } else {
        Err(RuleError::CardinalProfile)
    }
}

fn zero_tally(profile: &Profile) -> BTreeMap<String, i64> {
    profile.labels().map(|l| (l.to_string(), 0i64)).collect()
}

/// First-choice counts; most first places wins.
pub fn plurality(profile: &Profile) -> Result<VoteResult, RuleError> {
    require_ranked(profile)?;
    let mut tally = zero_tally(profile);
    for ballot in profile.ballots() {
        let Ballot::Ranked(ranking) = ballot else { unreachable!() };
        *tally.get_mut(&ranking[0]).expect("validated label") += 1;
    }
    let (winner, tied) = pick_best(&tally, false);
    let mut trace = Vec::new();
    if tied {
        tie_trace(&mut trace, &tally, &winner);
    }
    Ok(VoteResult { winner, tally, tiebreak_applied: tied, trace })
}

/// Positional scoring: with `m` candidates, rank `k` (0-based) earns
/// `m - 1 - k` points; unranked candidates earn 0. Highest total wins.
pub fn borda(profile: &Profile) -> Result<VoteResult, RuleError> {
    require_ranked(profile)?;
    let m = profile.candidates().len() as i64;
    let mut tally = zero_tally(profile);
    for ballot in profile.ballots() {
        let Ballot::Ranked(ranking) = ballot else { unreachable!() };
        for (pos, label) in ranking.iter().enumerate() {
            *tally.get_mut(label).expect("validated label") += m - 1 - pos as i64;
        }
    }
    let (winner, tied) = pick_best(&tally, false);
    let mut trace = Vec::new();
    if tied {
        tie_trace(&mut trace, &tally, &winner);
    }
    Ok(VoteResult { winner, tally, tiebreak_applied: tied, trace })
}

/// Accumulating rounds: round `r` credits each ballot's top `r` choices; the
/// election ends at the first round where some candidate exceeds half the
/// ballots, and the highest accumulated count in that round wins. If
/// truncation starves every round of a majority, the final round's maximum
/// wins (noted in the trace).
pub fn bucklin(profile: &Profile) -> Result<VoteResult, RuleError> {
    require_ranked(profile)?;
    let m = profile.candidates().len();
    let n_ballots = profile.ballots().len() as i64;
    let mut trace = Vec::new();
    let mut tally = zero_tally(profile);
    for round in 1..=m {
        tally = zero_tally(profile);
        for ballot in profile.ballots() {
            let Ballot::Ranked(ranking) = ballot else { unreachable!() };
            for label in ranking.iter().take(round) {
                *tally.get_mut(label).expect("validated label") += 1;
            }
        }
        let summary: Vec<String> = tally.iter().map(|(l, c)| format!("{l}={c}")).collect();
        trace.push(format!("round {round}: {}", summary.join(" ")));
        if tally.values().any(|&c| 2 * c > n_ballots) {
            let (winner, tied) = pick_best(&tally, false);
            trace.push(format!("round {round}: {winner} reaches a majority"));
            if tied {
                tie_trace(&mut trace, &tally, &winner);
            }
            return Ok(VoteResult { winner, tally, tiebreak_applied: tied, trace });
        }
    }
    trace.push("no candidate reached a majority; falling back to final-round maximum".to_string());
    let (winner, tied) = pick_best(&tally, false);
    if tied {
        tie_trace(&mut trace, &tally, &winner);
    }
    Ok(VoteResult { winner, tally, tiebreak_applied: tied, trace })
}

/// Instant-runoff: repeatedly eliminate the candidate with fewest current
/// first choices (ties eliminate the lexicographically last), transferring
/// ballots to their next surviving preference, until a candidate holds a
/// strict majority of the non-exhausted ballots or one candidate remains.
///
/// The tally records each survivor's final-round count and each eliminated
/// candidate's count at elimination.
pub fn irv(profile: &Profile) -> Result<VoteResult, RuleError> {
    require_ranked(profile)?;
    let mut eliminated: BTreeSet<&str> = BTreeSet::new();
    let mut tally = zero_tally(profile);
    let mut trace = Vec::new();
    let mut tiebreak_applied = false;
    let total = profile.candidates().len();

    for round in 1..=total {
        let mut counts: BTreeMap<&str, i64> = profile
            .labels()
            .filter(|l| !eliminated.contains(l))
            .map(|l| (l, 0i64))
            .collect();
        let mut active: i64 = 0;
        for ballot in profile.ballots() {
            let Ballot::Ranked(ranking) = ballot else { unreachable!() };
            if let Some(label) = ranking.iter().find(|l| !eliminated.contains(l.as_str())) {
                *counts.get_mut(label.as_str()).expect("survivor") += 1;
                active += 1;
            }
        }
        for (label, &count) in &counts {
            tally.insert((*label).to_string(), count);
        }

        if let Some((&leader, &top)) = counts.iter().max_by_key(|(_, &c)| c) {
            if 2 * top > active {
                trace.push(format!(
                    "round {round}: {leader} holds a majority ({top} of {active} active ballots)"
                ));
                return Ok(VoteResult {
                    winner: leader.to_string(),
                    tally,
                    tiebreak_applied,
                    trace,
                });
            }
        }
        if counts.len() == 1 {
            let (&winner, _) = counts.iter().next().expect("one survivor");
            trace.push(format!("round {round}: {winner} is the last remaining candidate"));
            return Ok(VoteResult { winner: winner.to_string(), tally, tiebreak_applied, trace });
        }

        let fewest = *counts.values().min().expect("non-empty");
        let losers: Vec<&str> = counts
            .iter()
            .filter(|(_, &c)| c == fewest)
            .map(|(&l, _)| l)
            .collect();
        // Reverse label order among tied losers keeps the lexicographically
        // first candidate alive, mirroring the selection tie-break.
        let victim = *losers.last().expect("non-empty");
        if losers.len() > 1 {
            tiebreak_applied = true;
            trace.push(format!(
                "round {round}: tie for fewest votes among {{{}}}; eliminating {} (reverse label order)",
                losers.join(", "),
                victim
            ));
        } else {
            trace.push(format!("round {round}: eliminating {victim} ({fewest} votes)"));
        }
        eliminated.insert(victim);
    }
    unreachable!("irv always terminates by majority or sole survivor")
}

/// Minimax (margins variant): each candidate is scored by its worst pairwise
/// defeat margin (zero if undefeated); the smallest worst-defeat wins, so a
/// Condorcet winner always wins. Lower tally is better.
pub fn minimax(profile: &Profile) -> Result<VoteResult, RuleError> {
    let matrix = pairwise_matrix(profile)?;
    let m = matrix.labels().len();
    let mut tally = BTreeMap::new();
    for i in 0..m {
        let worst = (0..m)
            .filter(|&j| j != i)
            .map(|j| matrix.margin(j, i))
            .filter(|&margin| margin > 0)
            .max()
            .unwrap_or(0);
        tally.insert(matrix.labels()[i].clone(), worst);
    }
    let (winner, tied) = pick_best(&tally, true);
    let mut trace = Vec::new();
    if tied {
        tie_trace(&mut trace, &tally, &winner);
    }
    Ok(VoteResult { winner, tally, tiebreak_applied: tied, trace })
}

/// Ranked pairs (Tideman): sort strict pairwise victories by margin (ties:
/// larger winning count, then lexicographic (winner, loser)), lock each
/// victory that does not complete a cycle, and elect the source of the
/// locked graph. The tally scores candidates by finish position
/// (`m-1` for the winner down to 0).
pub fn ranked_pairs(profile: &Profile) -> Result<VoteResult, RuleError> {
    let matrix = pairwise_matrix(profile)?;
    let labels = matrix.labels();
    let m = labels.len();
    let mut trace = Vec::new();

    let mut victories: Vec<(usize, usize, i64, u32)> = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i != j && matrix.count(i, j) > matrix.count(j, i) {
                victories.push((i, j, matrix.margin(i, j), matrix.count(i, j)));
            }
        }
    }
    // Label order only matters when two victories agree on both margin and
    // winning count; flag the tie-break whenever such a pair exists.
    let mut tiebreak_applied = false;
    for (a, rest) in victories.iter().enumerate() {
        for other in &victories[a + 1..] {
            if rest.2 == other.2 && rest.3 == other.3 {
                tiebreak_applied = true;
            }
        }
    }
    victories.sort_by(|a, b| {
        b.2.cmp(&a.2)
            .then(b.3.cmp(&a.3))
            .then_with(|| (&labels[a.0], &labels[a.1]).cmp(&(&labels[b.0], &labels[b.1])))
    });

    let mut locked = vec![vec![false; m]; m];
    let reaches = |locked: &Vec<Vec<bool>>, from: usize, to: usize| -> bool {
        let mut stack = vec![from];
        let mut seen = vec![false; m];
        while let Some(node) = stack.pop() {
            if node == to {
                return true;
            }
            if seen[node] {
                continue;
            }
            seen[node] = true;
            for (next, &edge) in locked[node].iter().enumerate() {
                if edge {
                    stack.push(next);
                }
            }
        }
        false
    };
    for (winner, loser, margin, _) in &victories {
        if reaches(&locked, *loser, *winner) {
            trace.push(format!(
                "skip {}>{} (would create a cycle)",
                labels[*winner], labels[*loser]
            ));
        } else {
            locked[*winner][*loser] = true;
            trace.push(format!("lock {}>{} (margin {})", labels[*winner], labels[*loser], margin));
        }
    }

    // Finish order by repeated source removal; sources are candidates with
    // no incoming locked edge from the remaining set.
    let mut remaining: BTreeSet<usize> = (0..m).collect();
    let mut tally = BTreeMap::new();
    let mut winner = None;
    let mut position = 0usize;
    while !remaining.is_empty() {
        let sources: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| remaining.iter().all(|&j| !locked[j][i]))
            .collect();
        // Iteration over the BTreeSet visits indices in candidate order,
        // which is not label order in general; resolve by label.
        let &next = sources
            .iter()
            .min_by_key(|&&i| &labels[i])
            .expect("acyclic graph always has a source");
        if sources.len() > 1 {
            tiebreak_applied = true;
            if position == 0 {
                let names: Vec<&str> =
                    sources.iter().map(|&i| labels[i].as_str()).collect();
                trace.push(format!(
                    "multiple sources {{{}}}; selecting {} by label order",
                    names.join(", "),
                    labels[next]
                ));
            }
        }
        tally.insert(labels[next].clone(), (m - 1 - position) as i64);
        if winner.is_none() {
            winner = Some(labels[next].clone());
        }
        remaining.remove(&next);
        position += 1;
    }

    Ok(VoteResult {
        winner: winner.expect("at least two candidates"),
        tally,
        tiebreak_applied,
        trace,
    })
}

/// Cardinal score summation; highest total wins. Scores a ballot omits count
/// as zero.
pub fn range_voting(profile: &Profile) -> Result<VoteResult, RuleError> {
    if profile.is_ranked() {
        return Err(RuleError::RankedProfile);
    }
    let mut tally = zero_tally(profile);
    for ballot in profile.ballots() {
        let Ballot::Cardinal(scores) = ballot else { unreachable!() };
        for (label, &score) in scores {
            if score > profile.score_max() {
                return Err(RuleError::ScoreOutOfRange {
                    label: label.clone(),
                    score,
                    max: profile.score_max(),
                });
            }
            *tally.get_mut(label).expect("validated label") += i64::from(score);
        }
    }
    let (winner, tied) = pick_best(&tally, false);
    let mut trace = Vec::new();
    if tied {
        tie_trace(&mut trace, &tally, &winner);
    }
    Ok(VoteResult { winner, tally, tiebreak_applied: tied, trace })
}

/// Name of a decision rule, as used in run configs and the `vote` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VotingRule {
    Plurality,
    Borda,
    Bucklin,
    Irv,
    Minimax,
    RankedPairs,
    Range,
}

impl VotingRule {
    pub const ALL: [VotingRule; 7] = [
        VotingRule::Plurality,
        VotingRule::Borda,
        VotingRule::Bucklin,
        VotingRule::Irv,
        VotingRule::Minimax,
        VotingRule::RankedPairs,
        VotingRule::Range,
    ];

    pub fn apply(&self, profile: &Profile) -> Result<VoteResult, RuleError> {
        match self {
            VotingRule::Plurality => plurality(profile),
            VotingRule::Borda => borda(profile),
            VotingRule::Bucklin => bucklin(profile),
            VotingRule::Irv => irv(profile),
            VotingRule::Minimax => minimax(profile),
            VotingRule::RankedPairs => ranked_pairs(profile),
            VotingRule::Range => range_voting(profile),
        }
    }

    /// True when the rule consumes ranked ballots (all but Range).
    pub fn wants_ranked(&self) -> bool {
        !matches!(self, VotingRule::Range)
    }
}

impl fmt::Display for VotingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            VotingRule::Plurality => "Plurality",
            VotingRule::Borda => "Borda Count",
            VotingRule::Bucklin => "Bucklin",
            VotingRule::Irv => "IRV",
            VotingRule::Minimax => "Minimax",
            VotingRule::RankedPairs => "Ranked Pairs",
            VotingRule::Range => "Range Voting",
        };
        f.write_str(name)
    }
}

impl core::str::FromStr for VotingRule {
    type Err = UnknownRule;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().replace(['-', ' '], "_").as_str() {
            "plurality" => Ok(VotingRule::Plurality),
            "borda" | "borda_count" => Ok(VotingRule::Borda),
            "bucklin" => Ok(VotingRule::Bucklin),
            "irv" | "instant_runoff" => Ok(VotingRule::Irv),
            "minimax" => Ok(VotingRule::Minimax),
            "ranked_pairs" => Ok(VotingRule::RankedPairs),
            "range" | "range_voting" => Ok(VotingRule::Range),
            _ => Err(UnknownRule(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownRule(pub String);

impl fmt::Display for UnknownRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown voting rule {:?}", self.0)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for UnknownRule {}
