//! Pooling decoded hyperparameters into the global predictive.
//!
//! Each decoded agent hyper is the prior plus that agent's private
//! evidence. Subtracting the prior isolates the evidence, and adding every
//! agent's evidence back onto a single copy of the prior reproduces the
//! hyper the principal would hold after seeing every sample directly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{batch_update, Belief, Family, Hyper, Outcome};
use crate::mechanisms::{probe_injectivity, InjectivityProbe, InjectivityWitness, Mechanism};
use crate::scoring::Report;

/// Slack allowed when checking that implied sample counts are integers.
pub const REACHABILITY_TOL: f64 = 1e-9;

/// Prior plus one decoded hyper per agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentReportSet {
    pub prior: Hyper,
    pub decoded: Vec<Hyper>,
}

impl AgentReportSet {
    pub fn pool(&self, family: Family) -> Result<Hyper> {
        pool(family, &self.prior, &self.decoded)
    }
}

// Rounds `offset` to the nearest integer, failing if it is not one.
fn snap(offset: f64, what: &str, agent: usize) -> Result<f64> {
    let r = offset.round();
    if (offset - r).abs() > REACHABILITY_TOL {
        return Err(Error::Aggregation(format!(
            "agent {agent}: {what} offset {offset} is not a whole number of samples"
        )));
    }
    Ok(r)
}

fn sorted_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum()
}

/// Pools decoded hypers: `nu0 + sum(nu_i - nu0)`, `n0 + sum(n_i - n0)`, or
/// the running maximum of `nu` for the uniform/Pareto family.
///
/// Every `n_i - n0` must be a nonnegative integer (within `1e-9`) and is
/// snapped to it; count-valued families snap their `nu` offsets too.
/// Terms are sorted before summing, so the result does not depend on the
/// order of `decoded`.
pub fn pool(family: Family, prior: &Hyper, decoded: &[Hyper]) -> Result<Hyper> {
    family.validate_hyper(prior)?;
    let mut n_offsets = Vec::with_capacity(decoded.len());
    for (i, h) in decoded.iter().enumerate() {
        family.validate_hyper(h)?;
        let dn = snap(h.n - prior.n, "sample-count", i)?;
        if dn < 0.0 {
            return Err(Error::Aggregation(format!(
                "agent {i}: n = {} is below the prior's {}",
                h.n, prior.n
            )));
        }
        n_offsets.push(dn);
    }
    let n = prior.n + sorted_sum(n_offsets);

    let nu = match family.canonical() {
        Family::UniformPareto => {
            let mut top = prior.nu[0];
            for (i, h) in decoded.iter().enumerate() {
                if h.nu[0] < prior.nu[0] * (1.0 - REACHABILITY_TOL) {
                    return Err(Error::Aggregation(format!(
                        "agent {i}: maximum {} is below the prior's {}",
                        h.nu[0], prior.nu[0]
                    )));
                }
                top = top.max(h.nu[0]);
            }
            vec![top]
        }
        _ => {
            let integer = family.integer_statistic();
            let mut nu = Vec::with_capacity(prior.nu.len());
            for (c, &base) in prior.nu.iter().enumerate() {
                let mut terms = Vec::with_capacity(decoded.len());
                for (i, h) in decoded.iter().enumerate() {
                    let d = h.nu[c] - base;
                    terms.push(if integer { snap(d, "statistic", i)? } else { d });
                }
                if integer && terms.iter().any(|d| *d < 0.0) {
                    return Err(Error::Aggregation(format!(
                        "component {c}: a decoded count falls below the prior"
                    )));
                }
                nu.push(base + sorted_sum(terms));
            }
            nu
        }
    };
    let pooled = Hyper::new(nu, n);
    family.validate_hyper(&pooled)?;
    Ok(pooled)
}

/// Hyper obtained by updating the prior on every sample at once.
pub fn oracle_global(family: Family, prior: &Hyper, all_samples: &[Outcome]) -> Result<Hyper> {
    batch_update(family, prior, all_samples)
}

/// Decodes every report and pools the results.
pub fn aggregate_end_to_end(mech: &Mechanism, reports: &[Report]) -> Result<Belief> {
    let decoded = reports
        .iter()
        .map(|r| mech.decode(r))
        .collect::<Result<Vec<_>>>()?;
    Belief::new(mech.family, pool(mech.family, &mech.prior, &decoded)?)
}

/// Largest componentwise `|a - b| / max(|a|, |b|, 1)` over `nu` and `n`.
pub fn max_relative_error(a: &Hyper, b: &Hyper) -> f64 {
    fn rel(x: f64, y: f64) -> f64 {
        if x == y {
            0.0
        } else {
            (x - y).abs() / x.abs().max(y.abs()).max(1.0)
        }
    }
    if a.nu.len() != b.nu.len() {
        return f64::INFINITY;
    }
    a.nu.iter()
        .zip(&b.nu)
        .map(|(x, y)| rel(*x, *y))
        .fold(rel(a.n, b.n), f64::max)
}

/// Two worlds that single-sample categorical reports cannot tell apart.
///
/// Agent 1 holds the witness's distinguishing multiset in both worlds.
/// Agent 2 holds the witness's first multiset in world A and its second in
/// world B; its predictive report is the same in both. Any aggregator that
/// sees only those reports returns one answer for both worlds, so it is off
/// by at least half of `total_variation` in one of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoWorlds {
    pub witness: InjectivityWitness,
    pub agent_one_samples: Vec<Outcome>,
    pub agent_two_report_a: Vec<f64>,
    pub agent_two_report_b: Vec<f64>,
    pub global_a: Hyper,
    pub global_b: Hyper,
    /// Sup difference between agent 2's reports across worlds.
    pub report_gap: f64,
    pub total_variation: f64,
}

/// Builds [`TwoWorlds`] from an injectivity witness; `None` when the probe
/// finds no collision (the family is then aggregable from one sample).
pub fn two_worlds<R: Rng + ?Sized>(
    family: Family,
    prior: &Hyper,
    budget: usize,
    rng: &mut R,
) -> Result<Option<TwoWorlds>> {
    let witness = match probe_injectivity(family, prior, budget, rng)? {
        InjectivityProbe::Witness(w) => w,
        InjectivityProbe::NoCollision { .. } => return Ok(None),
    };
    let k = family.categories().ok_or_else(|| {
        Error::Precondition("two-world demonstration needs a categorical family".into())
    })?;
    let probs = |h: &Hyper| h.nu.iter().map(|a| a / h.n).collect::<Vec<_>>();
    let report_a = probs(&witness.first);
    let report_b = probs(&witness.second);
    let one = &witness.distinguishing;
    let world = |two: &[Outcome]| {
        let all: Vec<Outcome> = one.iter().chain(two).copied().collect();
        oracle_global(family, prior, &all)
    };
    let global_a = world(&witness.first_samples)?;
    let global_b = world(&witness.second_samples)?;
    let (pa, pb) = (probs(&global_a), probs(&global_b));
    let total_variation = 0.5 * (0..k).map(|i| (pa[i] - pb[i]).abs()).sum::<f64>();
    let report_gap = report_a
        .iter()
        .zip(&report_b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(Some(TwoWorlds {
        agent_one_samples: one.clone(),
        witness,
        agent_two_report_a: report_a,
        agent_two_report_b: report_b,
        global_a,
        global_b,
        report_gap,
        total_variation,
    }))
}
