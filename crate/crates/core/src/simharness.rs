//! Seeded end-to-end trials: draw a world, let truthful agents report,
//! decode and pool the reports, and compare against the pooled-sample
//! oracle.
//!
//! Randomness comes from one root seed. Trial `t` keys a ChaCha8 generator
//! with `(seed, t)` and hands out disjoint streams: nature draws `theta*`
//! from stream 0, the principal's own outcomes come from stream 1, and
//! agent `i` uses stream `2 + i` for its sample count and samples. Adding
//! or removing an agent therefore leaves every other draw unchanged.

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregation::{max_relative_error, oracle_global, pool};
use crate::error::{Error, Result};
use crate::families::{
    batch_update, sample_theta, sample_x, Belief, Family, Hyper, HyperRepr, Outcome, Theta,
};
use crate::mechanisms::{ppd_distance, Mechanism, MechanismKind};
use crate::scoring::{
    expected_score, propriety_margin, score, AgentBelief, PerturbationGrid, Report, ScoreRule,
};

/// Largest relative hyper error accepted for real-valued statistics.
pub const CONTINUOUS_TOL: f64 = 1e-10;

pub const NATURE_STREAM: u64 = 0;
pub const PRINCIPAL_STREAM: u64 = 1;

pub fn agent_stream(agent: usize) -> u64 {
    2 + agent as u64
}

/// Generator for one `(trial, stream)` cell of the root seed.
pub fn substream(seed: u64, trial: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&trial.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// How many private samples each agent receives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleCountLaw {
    /// Agent `i` always gets `counts[i]`.
    Fixed(Vec<usize>),
    /// Each agent draws uniformly from `min..=max`, independently per trial.
    Range { min: usize, max: usize },
}

impl SampleCountLaw {
    fn draw<R: Rng + ?Sized>(&self, agent: usize, rng: &mut R) -> usize {
        match self {
            SampleCountLaw::Fixed(c) => c[agent],
            SampleCountLaw::Range { min, max } => rng.random_range(*min..=*max),
        }
    }
}

/// A fully specified simulated world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ConfigView", try_from = "ConfigView")]
pub struct ScenarioConfig {
    pub family: Family,
    pub prior: Hyper,
    pub agents: usize,
    pub samples: SampleCountLaw,
    pub mechanism: MechanismKind,
    pub trials: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

// Serialized shape: the family tag and constants sit at the top level and
// the prior uses the family's own field names.
#[derive(Serialize, Deserialize)]
struct ConfigView {
    #[serde(flatten)]
    family: Family,
    prior: HyperRepr,
    agents: usize,
    samples: SampleCountLaw,
    mechanism: MechanismKind,
    trials: usize,
    seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<PathBuf>,
}

impl From<ScenarioConfig> for ConfigView {
    fn from(c: ScenarioConfig) -> Self {
        ConfigView {
            prior: HyperRepr::encode(c.family, &c.prior),
            family: c.family,
            agents: c.agents,
            samples: c.samples,
            mechanism: c.mechanism,
            trials: c.trials,
            seed: c.seed,
            output: c.output,
        }
    }
}

impl TryFrom<ConfigView> for ScenarioConfig {
    type Error = Error;

    fn try_from(v: ConfigView) -> Result<Self> {
        let cfg = ScenarioConfig {
            family: v.family,
            prior: v.prior.to_hyper(),
            agents: v.agents,
            samples: v.samples,
            mechanism: v.mechanism,
            trials: v.trials,
            seed: v.seed,
            output: v.output,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl ScenarioConfig {
    /// Checks every cross-field constraint and returns the mechanism.
    pub fn validate(&self) -> Result<Mechanism> {
        self.family
            .validate_hyper(&self.prior)
            .map_err(|e| Error::Config(format!("prior: {e}")))?;
        let mech = Mechanism::new(self.mechanism, self.family, self.prior.clone())?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        match &self.samples {
            SampleCountLaw::Fixed(c) if c.len() != self.agents => {
                return Err(Error::Config(format!(
                    "fixed sample counts list {} entries for {} agents",
                    c.len(),
                    self.agents
                )))
            }
            SampleCountLaw::Range { min, max } if min > max => {
                return Err(Error::Config(format!("sample range {min}..={max} is empty")))
            }
            _ => {}
        }
        Ok(mech)
    }
}

/// One agent's part of a trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentTrial {
    pub samples: usize,
    pub true_hyper: Hyper,
    pub report: Report,
    pub decoded: Hyper,
    /// Score realized against the principal's outcome(s).
    pub score: f64,
    /// Score the agent expects under its own belief.
    pub expected_score: f64,
    /// Expected-score lead of the truthful report over the best grid alternative.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub theta: Theta,
    pub principal: Vec<Outcome>,
    pub agents: Vec<AgentTrial>,
    pub pooled: Hyper,
    pub oracle: Hyper,
    pub max_rel_error: f64,
    /// Sup distance between the pooled and oracle predictives.
    pub ppd_gap: f64,
    pub passed: bool,
}

struct World {
    theta: Theta,
    principal: Vec<Outcome>,
    agents: Vec<Vec<Outcome>>,
}

fn draw_world(cfg: &ScenarioConfig, principal_samples: usize, trial: usize) -> Result<World> {
    let (fam, t) = (cfg.family, trial as u64);
    let mut nature = substream(cfg.seed, t, NATURE_STREAM);
    let theta = sample_theta(fam, &cfg.prior, &mut nature)?;
    let mut rng = substream(cfg.seed, t, PRINCIPAL_STREAM);
    let principal = (0..principal_samples)
        .map(|_| sample_x(fam, &theta, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let agents = (0..cfg.agents)
        .map(|i| {
            let mut rng = substream(cfg.seed, t, agent_stream(i));
            let count = cfg.samples.draw(i, &mut rng);
            (0..count).map(|_| sample_x(fam, &theta, &mut rng)).collect()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(World { theta, principal, agents })
}

fn run_trial(
    cfg: &ScenarioConfig,
    mech: &Mechanism,
    grid: &PerturbationGrid,
    trial: usize,
) -> Result<TrialResult> {
    let fam = cfg.family;
    let rule = mech.rule();
    let world = draw_world(cfg, mech.principal_samples(), trial)?;
    let mut agents = Vec::with_capacity(cfg.agents);
    for xs in &world.agents {
        let true_hyper = batch_update(fam, &cfg.prior, xs)?;
        let report = mech.elicit(&true_hyper)?;
        let belief = AgentBelief::from(Belief::new(fam, true_hyper.clone())?);
        let (margin, _) = propriety_margin(rule, &belief, grid)?;
        agents.push(AgentTrial {
            samples: xs.len(),
            score: score(rule, &report, &world.principal)?,
            expected_score: expected_score(rule, &report, &belief)?,
            decoded: mech.decode(&report)?,
            true_hyper,
            report,
            margin,
        });
    }
    let decoded: Vec<Hyper> = agents.iter().map(|a| a.decoded.clone()).collect();
    let pooled = pool(fam, &cfg.prior, &decoded)?;
    let all: Vec<Outcome> = world.agents.concat();
    let oracle = oracle_global(fam, &cfg.prior, &all)?;
    let max_rel_error = max_relative_error(&pooled, &oracle);
    let passed = if fam.integer_statistic() {
        max_rel_error == 0.0
    } else {
        max_rel_error <= CONTINUOUS_TOL
    };
    Ok(TrialResult {
        trial,
        theta: world.theta,
        principal: world.principal,
        agents,
        ppd_gap: ppd_distance(fam, &pooled, &oracle),
        pooled,
        oracle,
        max_rel_error,
        passed,
    })
}

/// Runs every trial of `cfg` (in parallel) and returns them in trial order.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Vec<TrialResult>> {
    run_scenario_with_grid(cfg, &PerturbationGrid::default())
}

pub fn run_scenario_with_grid(
    cfg: &ScenarioConfig,
    grid: &PerturbationGrid,
) -> Result<Vec<TrialResult>> {
    let mech = cfg.validate()?;
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, &mech, grid, t))
        .collect()
}

/// Aggregates over a run. Fields that need at least one agent are `None`
/// when the scenario has none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub trials: usize,
    pub passed: usize,
    pub pass_rate: f64,
    pub min_margin: Option<f64>,
    pub max_rel_error: f64,
    pub max_ppd_gap: f64,
    pub mean_score: Option<f64>,
}

impl RunSummary {
    pub fn from_results(results: &[TrialResult]) -> Self {
        let passed = results.iter().filter(|r| r.passed).count();
        let agents = || results.iter().flat_map(|r| &r.agents);
        let count = agents().count();
        let min_margin = agents().map(|a| a.margin).reduce(f64::min);
        let mean_score = (count > 0).then(|| agents().map(|a| a.score).sum::<f64>() / count as f64);
        RunSummary {
            trials: results.len(),
            passed,
            pass_rate: if results.is_empty() { 0.0 } else { passed as f64 / results.len() as f64 },
            min_margin,
            max_rel_error: results.iter().map(|r| r.max_rel_error).fold(0.0, f64::max),
            max_ppd_gap: results.iter().map(|r| r.ppd_gap).fold(0.0, f64::max),
            mean_score,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.passed == self.trials
    }
}

/// One row of a propriety sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginRow {
    pub trial: usize,
    pub agent: usize,
    pub margin: f64,
    pub best_alternative: Report,
}

/// For each trial and agent of `cfg`, the expected-score margin of the
/// truthful report under `rule` over the best non-truthful grid point.
///
/// Agent beliefs are drawn exactly as in [`run_scenario`], so `rule` may
/// differ from the configured mechanism's (e.g. the log score on Dirichlet
/// beliefs).
pub fn propriety_sweep(
    cfg: &ScenarioConfig,
    rule: ScoreRule,
    grid: &PerturbationGrid,
) -> Result<Vec<MarginRow>> {
    let mech = cfg.validate()?;
    let rows: Vec<Vec<MarginRow>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let world = draw_world(cfg, mech.principal_samples(), t)?;
            world
                .agents
                .iter()
                .enumerate()
                .map(|(i, xs)| {
                    let h = batch_update(cfg.family, &cfg.prior, xs)?;
                    let belief = AgentBelief::from(Belief::new(cfg.family, h)?);
                    let (margin, best_alternative) = propriety_margin(rule, &belief, grid)?;
                    Ok(MarginRow { trial: t, agent: i, margin, best_alternative })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(rows.concat())
}
