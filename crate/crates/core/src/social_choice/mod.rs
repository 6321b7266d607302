//! Voting rules for aggregating agent preferences into one decision.
//!
//! A [`Profile`] holds the candidate set and the ballots (ranked orderings
//! or cardinal score maps). The seven rules consume a profile and return a
//! [`VoteResult`] carrying the winner, the per-candidate tally the rule used,
//! whether the lexicographic tie-break fired, and a trace of round/lock
//! events. All functions are pure and deterministic.

mod profile;
mod rules;

pub use profile::{Ballot, Candidate, Profile, ProfileError, DEFAULT_SCORE_MAX};
pub use rules::{
    borda, bucklin, condorcet_winner, irv, minimax, pairwise_matrix, plurality, range_voting,
    ranked_pairs, PairwiseMatrix, RuleError, VoteResult, VotingRule,
};
