//! Strictly proper scoring rules, expected scores under an agent's belief,
//! and the grid-search machinery used to check propriety empirically.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{density_unchecked, Belief, Family, Hyper, Outcome};
use crate::quad;

/// Score assigned to a log-score report that put zero mass on the outcome.
pub const LOG_ZERO_SENTINEL: f64 = -1e12;

const QUAD_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScoreRule {
    /// `log r(x)`.
    Log,
    /// `2 r x - r^2`, elicits the mean.
    BrierMean,
    /// `sum_i 2 r_i x^i - r_i^2` over the first `k` moments.
    BrierMoments(usize),
    /// `log p(x1) + 2 b 1{x1 = x2} - b^2`, consumes two outcomes.
    TwoSampleComposite,
}

impl ScoreRule {
    pub fn outcome_arity(&self) -> usize {
        match self {
            ScoreRule::TwoSampleComposite => 2,
            _ => 1,
        }
    }
}

/// What an agent hands to the principal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Report {
    /// Probability vector over labels `1..=K`.
    Categorical(Vec<f64>),
    /// A full predictive, given parametrically.
    Parametric(Belief),
    /// Raw moment estimates `(E[x], E[x^2], ...)`.
    Moments(Vec<f64>),
    /// First-sample distribution plus the probability that two samples match.
    Composite { p: Vec<f64>, b: f64 },
}

impl Report {
    pub fn validate(&self) -> Result<()> {
        match self {
            Report::Categorical(p) => check_simplex(p),
            Report::Parametric(belief) => belief.family.validate_hyper(&belief.hyper),
            Report::Moments(r) if r.iter().all(|v| v.is_finite()) => Ok(()),
            Report::Moments(_) => Err(Error::Domain("moment report must be finite".into())),
            Report::Composite { p, b } => {
                check_simplex(p)?;
                if (0.0..=1.0).contains(b) {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("match probability must lie in [0, 1], got {b}")))
                }
            }
        }
    }
}

pub(crate) fn check_simplex(p: &[f64]) -> Result<()> {
    if p.len() < 2 {
        return Err(Error::Domain("probability vector needs at least two entries".into()));
    }
    if p.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(Error::Domain(format!("probabilities must be nonnegative, got {p:?}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// Belief an agent scores reports against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AgentBelief {
    Conjugate(Belief),
    /// A bare categorical distribution with no hyper behind it.
    Categorical(Vec<f64>),
}

impl From<Belief> for AgentBelief {
    fn from(b: Belief) -> Self {
        AgentBelief::Conjugate(b)
    }
}

impl AgentBelief {
    fn probabilities(&self) -> Option<Vec<f64>> {
        match self {
            AgentBelief::Conjugate(b) => b.probabilities(),
            AgentBelief::Categorical(p) => Some(p.clone()),
        }
    }
}

fn log_or_sentinel(p: f64) -> f64 {
    if p > 0.0 {
        p.ln()
    } else {
        LOG_ZERO_SENTINEL
    }
}

fn category_index(x: &Outcome, k: usize) -> Result<usize> {
    match *x {
        Outcome::Category(i) if (1..=k).contains(&i) => Ok(i - 1),
        _ => Err(Error::Arity(format!("{x:?} is not a label in 1..={k}"))),
    }
}

fn numeric(x: &Outcome) -> Result<f64> {
    x.value()
        .ok_or_else(|| Error::Arity(format!("{x:?} has no numeric value for a moment rule")))
}

fn brier_terms(r: &[f64], x: f64) -> f64 {
    let mut power = 1.0;
    r.iter()
        .map(|ri| {
            power *= x;
            2.0 * ri * power - ri * ri
        })
        .sum()
}

/// Realized score of `report` once the principal observes `outcomes`.
pub fn score(rule: ScoreRule, report: &Report, outcomes: &[Outcome]) -> Result<f64> {
    if outcomes.len() != rule.outcome_arity() {
        return Err(Error::Arity(format!(
            "{rule:?} consumes {} outcome(s), got {}",
            rule.outcome_arity(),
            outcomes.len()
        )));
    }
    match (rule, report) {
        (ScoreRule::Log, Report::Categorical(p)) => {
            Ok(log_or_sentinel(p[category_index(&outcomes[0], p.len())?]))
        }
        (ScoreRule::Log, Report::Parametric(belief)) => {
            belief.family.check_outcome(&outcomes[0])?;
            Ok(log_or_sentinel(density_unchecked(belief.family, &belief.hyper, &outcomes[0])))
        }
        (ScoreRule::BrierMean, Report::Moments(r)) if r.len() == 1 => {
            Ok(brier_terms(r, numeric(&outcomes[0])?))
        }
        (ScoreRule::BrierMoments(k), Report::Moments(r)) if r.len() == k && (1..=2).contains(&k) => {
            Ok(brier_terms(r, numeric(&outcomes[0])?))
        }
        (ScoreRule::TwoSampleComposite, Report::Composite { p, b }) => {
            let i = category_index(&outcomes[0], p.len())?;
            let j = category_index(&outcomes[1], p.len())?;
            let hit = if i == j { 1.0 } else { 0.0 };
            Ok(log_or_sentinel(p[i]) + 2.0 * b * hit - b * b)
        }
        _ => Err(Error::Arity(format!("report {report:?} does not fit rule {rule:?}"))),
    }
}

/// Expected score of `report` when outcomes follow `belief`.
///
/// Discrete beliefs are summed exactly (Poisson tails until the remaining
/// mass is below `1e-15`); continuous log scores use adaptive quadrature;
/// Brier rules are linear in the moments and use them directly.
pub fn expected_score(rule: ScoreRule, report: &Report, belief: &AgentBelief) -> Result<f64> {
    match (rule, report) {
        (ScoreRule::Log, Report::Categorical(r)) => {
            let q = belief
                .probabilities()
                .ok_or_else(|| Error::Arity("categorical report needs a categorical belief".into()))?;
            if q.len() != r.len() {
                return Err(Error::Arity("report and belief disagree on K".into()));
            }
            Ok(q.iter()
                .zip(r)
                .filter(|(qi, _)| **qi > 0.0)
                .map(|(qi, ri)| qi * log_or_sentinel(*ri))
                .sum())
        }
        (ScoreRule::Log, Report::Parametric(reported)) => {
            let truth = match belief {
                AgentBelief::Conjugate(b) if b.family.canonical() == reported.family.canonical() => b,
                _ => return Err(Error::Arity("parametric report needs a belief of the same family".into())),
            };
            Ok(expected_log_parametric(truth, reported))
        }
        (ScoreRule::BrierMean | ScoreRule::BrierMoments(_), Report::Moments(r)) => {
            let k = match rule {
                ScoreRule::BrierMean => 1,
                ScoreRule::BrierMoments(k) => k,
                _ => unreachable!(),
            };
            if r.len() != k {
                return Err(Error::Arity(format!("{rule:?} needs {k} moments, got {}", r.len())));
            }
            let mu = match belief {
                AgentBelief::Conjugate(b) => b.moments(k)?,
                AgentBelief::Categorical(_) => {
                    return Err(Error::Arity("category labels have no moments".into()))
                }
            };
            Ok(r.iter().zip(&mu).map(|(ri, mi)| 2.0 * ri * mi - ri * ri).sum())
        }
        (ScoreRule::TwoSampleComposite, Report::Composite { p, b }) => {
            let alpha = match belief {
                AgentBelief::Conjugate(bel) if bel.family.is_categorical() => &bel.hyper.nu,
                _ => {
                    return Err(Error::Arity(
                        "the two-sample rule needs a Dirichlet belief over outcome pairs".into(),
                    ))
                }
            };
            if alpha.len() != p.len() {
                return Err(Error::Arity("report and belief disagree on K".into()));
            }
            let joint = pair_distribution(alpha);
            let k = alpha.len();
            let mut total = 0.0;
            for i in 0..k {
                for j in 0..k {
                    let w = joint[i * k + j];
                    if w > 0.0 {
                        let hit = if i == j { 1.0 } else { 0.0 };
                        total += w * (log_or_sentinel(p[i]) + 2.0 * b * hit - b * b);
                    }
                }
            }
            Ok(total)
        }
        _ => Err(Error::Arity(format!("report {report:?} does not fit rule {rule:?}"))),
    }
}

/// Joint law of two exchangeable draws under a Dirichlet(alpha) belief,
/// row-major `K x K`: `alpha_i (alpha_j + [i = j]) / (n (n + 1))`.
pub fn pair_distribution(alpha: &[f64]) -> Vec<f64> {
    let n: f64 = alpha.iter().sum();
    let k = alpha.len();
    let mut out = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            let extra = if i == j { 1.0 } else { 0.0 };
            out[i * k + j] = alpha[i] * (alpha[j] + extra) / (n * (n + 1.0));
        }
    }
    out
}

fn expected_log_parametric(truth: &Belief, reported: &Belief) -> f64 {
    let fam = truth.family;
    let (th, rh) = (&truth.hyper, &reported.hyper);
    let term = |o: Outcome| {
        let q = density_unchecked(fam, th, &o);
        if q > 0.0 {
            q * log_or_sentinel(density_unchecked(reported.family, rh, &o))
        } else {
            0.0
        }
    };
    match fam.canonical() {
        Family::CategoricalDirichlet { k } => (1..=k).map(|i| term(Outcome::Category(i))).sum(),
        Family::PoissonGamma => {
            // Past the mode the pmf ratio (c + nu) / ((c + 1)(n + 1)) falls
            // below one, so the remaining mass is bounded geometrically.
            let (nu, n) = (th.nu[0], th.n);
            let mut total = 0.0;
            let mut c: u64 = 0;
            loop {
                let q = density_unchecked(fam, th, &Outcome::Count(c));
                total += term(Outcome::Count(c));
                let x = c as f64;
                let ratio = (x + nu) / ((x + 1.0) * (n + 1.0));
                if (ratio < 1.0 && q * ratio / (1.0 - ratio) * (x + 2.0) < 1e-18) || c >= 10_000_000 {
                    break;
                }
                c += 1;
            }
            total
        }
        Family::NormalKnownVar { variance } => {
            let mean = th.nu[0] / th.n;
            let sd = (variance * (1.0 + 1.0 / th.n)).sqrt();
            let f = |x: f64| term(Outcome::Real(x));
            let (lo, hi) = (mean - 40.0 * sd, mean + 40.0 * sd);
            quad::integrate(f, lo, mean, QUAD_TOL) + quad::integrate(f, mean, hi, QUAD_TOL)
        }
        Family::UniformPareto => {
            let f = |x: f64| term(Outcome::Real(x));
            let a = th.nu[0].min(rh.nu[0]);
            let b = th.nu[0].max(rh.nu[0]);
            quad::integrate(f, 0.0, a, QUAD_TOL)
                + quad::integrate(f, a, b, QUAD_TOL)
                + quad::integrate_to_inf(f, b, QUAD_TOL)
        }
        Family::BernoulliBeta => unreachable!("canonical form"),
    }
}

/// The report a truthful, expected-score-maximizing agent gives under `rule`.
pub fn truthful_report(rule: ScoreRule, belief: &AgentBelief) -> Result<Report> {
    match (rule, belief) {
        (ScoreRule::Log, AgentBelief::Categorical(p)) => Ok(Report::Categorical(p.clone())),
        (ScoreRule::Log, AgentBelief::Conjugate(b)) => Ok(match b.probabilities() {
            Some(p) => Report::Categorical(p),
            None => Report::Parametric(b.clone()),
        }),
        (ScoreRule::BrierMean, AgentBelief::Conjugate(b)) => Ok(Report::Moments(b.moments(1)?)),
        (ScoreRule::BrierMoments(k), AgentBelief::Conjugate(b)) => Ok(Report::Moments(b.moments(k)?)),
        (ScoreRule::TwoSampleComposite, AgentBelief::Conjugate(b)) if b.family.is_categorical() => {
            let alpha = crate::families::DirichletHyper::from(&b.hyper);
            Ok(Report::Composite {
                p: alpha.mean(),
                b: crate::mechanisms::match_probability(&alpha),
            })
        }
        _ => Err(Error::Arity(format!("no truthful {rule:?} report for {belief:?}"))),
    }
}

/// Grid element with the highest expected score under `belief`.
pub fn best_response(rule: ScoreRule, belief: &AgentBelief, grid: &[Report]) -> Result<Report> {
    let mut best: Option<(f64, &Report)> = None;
    for r in grid {
        let s = expected_score(rule, r, belief)?;
        if best.is_none_or(|(bs, _)| s > bs) {
            best = Some((s, r));
        }
    }
    best.map(|(_, r)| r.clone()).ok_or(Error::EmptyGrid)
}

/// Candidate reports around a truthful one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationGrid {
    /// Additive perturbation sizes (relative for parametric hypers).
    pub deltas: Vec<f64>,
    /// Simplex mesh spacing used for categorical reports.
    pub simplex_step: f64,
    /// Largest K that gets the full simplex mesh; larger K uses pairwise moves.
    pub mesh_max_k: usize,
}

impl Default for PerturbationGrid {
    fn default() -> Self {
        PerturbationGrid {
            deltas: vec![0.01, 0.05, 0.1],
            simplex_step: 0.05,
            mesh_max_k: 3,
        }
    }
}

/// All points of the simplex in `K` dimensions with coordinates on a
/// `step` lattice.
pub fn simplex_mesh(k: usize, step: f64) -> Vec<Vec<f64>> {
    let m = (1.0 / step).round() as usize;
    let mut out = Vec::new();
    let mut current = vec![0usize; k];
    fn rec(pos: usize, left: usize, cur: &mut Vec<usize>, m: usize, out: &mut Vec<Vec<f64>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.iter().map(|&c| c as f64 / m as f64).collect());
            return;
        }
        for c in 0..=left {
            cur[pos] = c;
            rec(pos + 1, left - c, cur, m, out);
        }
    }
    rec(0, m, &mut current, m, &mut out);
    out
}

fn pairwise_moves(p: &[f64], deltas: &[f64]) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..p.len() {
        for j in 0..p.len() {
            if i == j {
                continue;
            }
            for &d in deltas {
                let d = d.min(p[j]);
                if d <= 0.0 {
                    continue;
                }
                let mut q = p.to_vec();
                q[i] += d;
                q[j] -= d;
                out.push(q);
            }
        }
    }
    out
}

fn same_report(a: &Report, b: &Report) -> bool {
    fn close(x: &[f64], y: &[f64]) -> bool {
        x.len() == y.len() && x.iter().zip(y).all(|(u, v)| (u - v).abs() <= 1e-12)
    }
    match (a, b) {
        (Report::Categorical(x), Report::Categorical(y)) | (Report::Moments(x), Report::Moments(y)) => {
            close(x, y)
        }
        (Report::Parametric(x), Report::Parametric(y)) => {
            close(&x.hyper.nu, &y.hyper.nu) && (x.hyper.n - y.hyper.n).abs() <= 1e-12
        }
        (Report::Composite { p, b }, Report::Composite { p: q, b: c }) => {
            close(p, q) && (b - c).abs() <= 1e-12
        }
        _ => false,
    }
}

fn renormalize(mut p: Vec<f64>) -> Vec<f64> {
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= total);
    p
}

impl PerturbationGrid {
    /// Non-truthful candidates around `truthful`; entries within `1e-12` of
    /// the truth are dropped.
    pub fn alternatives(&self, truthful: &Report) -> Vec<Report> {
        let mut out = Vec::new();
        match truthful {
            Report::Categorical(p) => {
                let points = if p.len() <= self.mesh_max_k {
                    simplex_mesh(p.len(), self.simplex_step)
                } else {
                    pairwise_moves(p, &self.deltas)
                };
                out.extend(points.into_iter().map(|q| Report::Categorical(renormalize(q))));
            }
            Report::Moments(r) => {
                let mut signed: Vec<f64> = self.deltas.iter().flat_map(|&d| [d, -d]).collect();
                signed.push(0.0);
                if r.len() == 1 {
                    out.extend(signed.iter().map(|d| Report::Moments(vec![r[0] + d])));
                } else {
                    for d0 in &signed {
                        for d1 in &signed {
                            let mut q = r.clone();
                            q[0] += d0;
                            q[1] += d1;
                            out.push(Report::Moments(q));
                        }
                    }
                }
            }
            Report::Parametric(b) => {
                let fam = b.family;
                for &d in &self.deltas {
                    for (fn_nu, fn_n) in [(1.0 + d, 1.0), (1.0 - d, 1.0), (1.0, 1.0 + d), (1.0, 1.0 - d)] {
                        let h = Hyper {
                            nu: b.hyper.nu.iter().map(|v| v * fn_nu).collect(),
                            n: b.hyper.n * fn_n,
                        };
                        // A zero nu stays put under relative moves; shift it instead.
                        let h = if b.hyper.nu.iter().all(|v| *v == 0.0) && fn_nu != 1.0 {
                            Hyper { nu: vec![fn_nu - 1.0; h.nu.len()], n: h.n }
                        } else {
                            h
                        };
                        if let Ok(r) = Belief::new(fam, h) {
                            out.push(Report::Parametric(r));
                        }
                    }
                }
            }
            Report::Composite { p, b } => {
                let mut ps = vec![p.clone()];
                ps.extend(pairwise_moves(p, &self.deltas));
                let mut bs = vec![*b];
                for &d in &self.deltas {
                    bs.push((b + d).min(1.0));
                    bs.push((b - d).max(0.0));
                }
                for q in &ps {
                    for &c in &bs {
                        out.push(Report::Composite { p: renormalize(q.clone()), b: c });
                    }
                }
            }
        }
        out.retain(|r| !same_report(r, truthful));
        out
    }

    /// Truthful report followed by every alternative.
    pub fn candidates(&self, truthful: &Report) -> Vec<Report> {
        let mut out = vec![truthful.clone()];
        out.extend(self.alternatives(truthful));
        out
    }
}

/// Expected-score gap between the truthful report and the best alternative
/// on `grid`. Positive means the truth strictly wins.
pub fn propriety_margin(
    rule: ScoreRule,
    belief: &AgentBelief,
    grid: &PerturbationGrid,
) -> Result<(f64, Report)> {
    let truthful = truthful_report(rule, belief)?;
    let truth_score = expected_score(rule, &truthful, belief)?;
    let alternatives = grid.alternatives(&truthful);
    let best = best_response(rule, belief, &alternatives)?;
    let best_score = expected_score(rule, &best, belief)?;
    Ok((truth_score - best_score, best))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat(i: usize) -> Outcome {
        Outcome::Category(i)
    }

    #[test]
    fn log_score_categorical() {
        let r = Report::Categorical(vec![0.4, 0.4, 0.2]);
        let s = score(ScoreRule::Log, &r, &[cat(3)]).unwrap();
        assert!((s - 0.2f64.ln()).abs() < 1e-15);
        assert!((s + 1.6094).abs() < 1e-4);
    }

    #[test]
    fn brier_moments_example() {
        let r = Report::Moments(vec![2.0, 20.0 / 3.0]);
        let s = score(ScoreRule::BrierMoments(2), &r, &[Outcome::Count(3)]).unwrap();
        // Evaluated term by term: 12 - 4 + 120 - 400/9.
        let expect = 12.0 - 4.0 + 120.0 - 400.0 / 9.0;
        assert!((s - expect).abs() < 1e-12);
        assert!((s - 83.5555).abs() < 1e-3);
    }

    #[test]
    fn composite_example() {
        let r = Report::Composite { p: vec![0.5, 0.5], b: 0.5 };
        let s = score(ScoreRule::TwoSampleComposite, &r, &[cat(1), cat(1)]).unwrap();
        assert!((s - (0.5f64.ln() + 1.0 - 0.25)).abs() < 1e-15);
        assert!((s - 0.0568).abs() < 1e-4);
    }

    #[test]
    fn zero_mass_gives_sentinel() {
        let r = Report::Categorical(vec![1.0, 0.0]);
        assert_eq!(score(ScoreRule::Log, &r, &[cat(2)]).unwrap(), LOG_ZERO_SENTINEL);
    }

    #[test]
    fn arity_errors() {
        let r = Report::Composite { p: vec![0.5, 0.5], b: 0.5 };
        assert!(matches!(
            score(ScoreRule::TwoSampleComposite, &r, &[cat(1)]),
            Err(Error::Arity(_))
        ));
        let m = Report::Moments(vec![1.0]);
        assert!(score(ScoreRule::BrierMoments(2), &m, &[Outcome::Real(1.0)]).is_err());
        assert!(score(ScoreRule::BrierMean, &m, &[cat(1)]).is_err());
        assert!(score(ScoreRule::Log, &m, &[cat(1)]).is_err());
    }

    #[test]
    fn report_validation() {
        assert!(Report::Categorical(vec![0.5, 0.6]).validate().is_err());
        assert!(Report::Categorical(vec![-0.1, 1.1]).validate().is_err());
        assert!(Report::Composite { p: vec![0.5, 0.5], b: 1.2 }.validate().is_err());
        assert!(Report::Composite { p: vec![0.5, 0.5], b: 0.3 }.validate().is_ok());
    }

    #[test]
    fn expected_log_is_negative_entropy() {
        let p = vec![0.4, 0.4, 0.2];
        let belief = AgentBelief::Categorical(p.clone());
        let s = expected_score(ScoreRule::Log, &Report::Categorical(p.clone()), &belief).unwrap();
        let neg_entropy: f64 = p.iter().map(|q| q * q.ln()).sum();
        assert!((s - neg_entropy).abs() < 1e-15);
        assert!((s + 1.0549).abs() < 1e-4);
    }

    #[test]
    fn expected_brier_mean_at_truth() {
        let b = Belief::new(Family::PoissonGamma, Hyper::scalar(6.0, 3.0)).unwrap();
        let s = expected_score(ScoreRule::BrierMean, &Report::Moments(vec![2.0]), &b.into()).unwrap();
        assert!((s - 4.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_belief_kl_gap() {
        let belief = AgentBelief::Categorical(vec![1.0, 0.0, 0.0]);
        let truth = expected_score(ScoreRule::Log, &Report::Categorical(vec![1.0, 0.0, 0.0]), &belief)
            .unwrap();
        let other =
            expected_score(ScoreRule::Log, &Report::Categorical(vec![0.95, 0.05, 0.0]), &belief)
                .unwrap();
        assert!((truth - other - (-(0.95f64).ln())).abs() < 1e-12);
    }

    #[test]
    fn best_response_examples() {
        let belief = AgentBelief::Categorical(vec![0.4, 0.4, 0.2]);
        let grid: Vec<Report> = simplex_mesh(3, 0.05).into_iter().map(Report::Categorical).collect();
        let best = best_response(ScoreRule::Log, &belief, &grid).unwrap();
        match best {
            Report::Categorical(p) => {
                for (a, b) in p.iter().zip([0.4, 0.4, 0.2]) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
            _ => panic!("wrong report kind"),
        }

        let b = Belief::new(Family::PoissonGamma, Hyper::scalar(6.0, 3.0)).unwrap();
        let grid: Vec<Report> = [1.0, 1.5, 2.0, 2.5, 3.0].iter().map(|&r| Report::Moments(vec![r])).collect();
        let best = best_response(ScoreRule::BrierMean, &b.into(), &grid).unwrap();
        assert_eq!(best, Report::Moments(vec![2.0]));
    }

    #[test]
    fn empty_grid_errors() {
        let belief = AgentBelief::Categorical(vec![0.5, 0.5]);
        assert_eq!(best_response(ScoreRule::Log, &belief, &[]), Err(Error::EmptyGrid));
    }

    #[test]
    fn simplex_mesh_size() {
        // C(20 + 2, 2) lattice points for K = 3, step 0.05.
        let mesh = simplex_mesh(3, 0.05);
        assert_eq!(mesh.len(), 231);
        assert!(mesh.iter().all(|p| (p.iter().sum::<f64>() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn pair_distribution_sums_to_one() {
        let joint = pair_distribution(&[8.0, 8.0, 4.0]);
        assert!((joint.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        // Marginal of the first draw is alpha / n.
        let row0: f64 = joint[0..3].iter().sum();
        assert!((row0 - 0.4).abs() < 1e-15);
    }

    #[test]
    fn brier_margins_symmetric() {
        let b = Belief::new(Family::PoissonGamma, Hyper::scalar(6.0, 3.0)).unwrap();
        let belief: AgentBelief = b.into();
        let t = expected_score(ScoreRule::BrierMean, &Report::Moments(vec![2.0]), &belief).unwrap();
        for d in [0.01, 0.05, 0.1] {
            let up = expected_score(ScoreRule::BrierMean, &Report::Moments(vec![2.0 + d]), &belief).unwrap();
            let dn = expected_score(ScoreRule::BrierMean, &Report::Moments(vec![2.0 - d]), &belief).unwrap();
            assert!(((t - up) - (t - dn)).abs() < 1e-12);
            assert!(((t - up) - d * d).abs() < 1e-12);
        }
    }
}
