//! Deterministic decision primitives for multi-agent answer aggregation.
//!
//! This crate holds the pure algorithmic core shared by the `conclave`
//! engine: the seven ranked/cardinal voting rules with pairwise-majority
//! machinery, the competing-hypotheses analysis protocol (prompt rendering,
//! tolerant report parsing, falsification-based selection, compliance
//! audit), and the rule-based reward stack with its cosine annealing
//! schedule.
//!
//! Everything here is a pure function of its inputs: no IO, no clocks, no
//! global randomness. Randomized operations take an explicit [`rng::SplitMix64`]
//! so results are reproducible bit-for-bit from a seed. The crate is
//! `no_std`-compatible (with `alloc`); disable the default `std` feature to
//! use it in embedded or sandboxed hosts.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod ach;
pub mod extract;
pub mod hash;
pub mod rewards;
pub mod rng;
pub mod social_choice;

pub use ach::{AchMatrix, AchReport, CellMark, Evidence, Hypothesis, PromptVariant};
pub use rewards::{AnnealState, Embedder, RewardBreakdown, RolloutRecord, Stage};
pub use social_choice::{Ballot, Candidate, PairwiseMatrix, Profile, VoteResult, VotingRule};
