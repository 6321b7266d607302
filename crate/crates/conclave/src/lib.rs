//! Collaborative decision engine for LLM multi-agent systems.
//!
//! Executors answer a query independently; a decision strategy (a voting
//! rule, an unstructured dictatorial decider, or the structured
//! competing-hypotheses protocol) resolves their answers into one decision.
//! The engine runs those pipelines over MCQA datasets with scripted or live
//! HTTP agents, scores rollouts with the rule-based reward stack, and emits
//! Table-style accuracy reports, scaling sweeps, and trainer-ready JSONL.
//!
//! The pure algorithms live in `conclave-core`; this crate adds IO, agent
//! backends, orchestration, benchmarking, and the CLI.

pub mod agents;
pub mod benchmark;
pub mod cli;
pub mod config;
pub mod embedding;
pub mod orchestrator;
pub mod rollout;
pub mod runner;

pub use conclave_core as core;
