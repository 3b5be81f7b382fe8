//! Elicitation of posterior predictive reports from Bayesian agents under
//! proper scoring rules, and exact pooling of the decoded reports.

pub mod aggregation;
pub mod cli;
pub mod config;
pub mod conjecture_lab;
pub mod error;
pub mod families;
pub mod mechanisms;
pub mod quad;
pub mod records;
pub mod scoring;
pub mod simharness;

pub use aggregation::{aggregate_end_to_end, oracle_global, pool};
pub use error::{Error, Result};
pub use families::{Belief, DirichletHyper, Family, Hyper, Outcome};
pub use mechanisms::{decode, elicit, match_probability, Mechanism, MechanismKind};
pub use scoring::{expected_score, score, Report, ScoreRule};
pub use simharness::{run_scenario, RunSummary, ScenarioConfig, TrialResult};
