//! Elicitation mechanisms: turn truthful reports back into hyperparameters.
//!
//! A single principal sample suffices whenever the map from hyperparameters
//! to predictive distributions is injective (Normal, Poisson, uniform). The
//! categorical family is not injective, since scaling `alpha` leaves `alpha / n`
//! unchanged; there the principal uses two samples and also asks for the
//! probability that they coincide.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{
    batch_update, density_unchecked, ppd_moments, sample_theta, sample_x, Belief, DirichletHyper,
    Family, Hyper, Outcome,
};
use crate::scoring::{check_simplex, Report, ScoreRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MechanismKind {
    /// Brier score on the first two moments, one principal sample.
    SingleSampleMoments,
    /// Log score on the full predictive, one principal sample.
    #[serde(rename = "SingleSampleFullPPD")]
    SingleSampleFullPpd,
    /// Log score on the first sample plus Brier on the match indicator.
    TwoSampleDirichlet,
}

impl MechanismKind {
    pub fn name(&self) -> &'static str {
        match self {
            MechanismKind::SingleSampleMoments => "SingleSampleMoments",
            MechanismKind::SingleSampleFullPpd => "SingleSampleFullPPD",
            MechanismKind::TwoSampleDirichlet => "TwoSampleDirichlet",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "SingleSampleMoments" => Ok(MechanismKind::SingleSampleMoments),
            "SingleSampleFullPPD" => Ok(MechanismKind::SingleSampleFullPpd),
            "TwoSampleDirichlet" => Ok(MechanismKind::TwoSampleDirichlet),
            other => Err(Error::Config(format!("unknown mechanism {other:?}"))),
        }
    }

    /// Checks that this mechanism can aggregate `family` optimally.
    pub fn supports(&self, family: Family) -> Result<()> {
        match (self, family.is_categorical()) {
            (MechanismKind::TwoSampleDirichlet, true) => Ok(()),
            (MechanismKind::TwoSampleDirichlet, false) => Err(Error::Config(format!(
                "TwoSampleDirichlet needs a categorical family, got {}",
                family.name()
            ))),
            (_, true) => Err(Error::Config(format!(
                "{} cannot aggregate {}: one principal sample only reveals the predictive \
                 alpha/n, and scaling alpha by any c > 0 leaves it unchanged while changing \
                 the pooled result, so confidence is unidentifiable; use TwoSampleDirichlet",
                self.name(),
                family.name()
            ))),
            (_, false) => Ok(()),
        }
    }
}

/// A mechanism bound to a family and the common prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mechanism {
    pub kind: MechanismKind,
    pub family: Family,
    pub prior: Hyper,
}

impl Mechanism {
    pub fn new(kind: MechanismKind, family: Family, prior: Hyper) -> Result<Self> {
        family.validate_hyper(&prior)?;
        kind.supports(family)?;
        if kind == MechanismKind::SingleSampleMoments || kind == MechanismKind::SingleSampleFullPpd {
            if family.canonical() == Family::UniformPareto && prior.n <= 2.0 {
                return Err(Error::Config(format!(
                    "uniform/Pareto moment inversion needs prior n > 2, got {}",
                    prior.n
                )));
            }
        }
        Ok(Mechanism { kind, family, prior })
    }

    pub fn rule(&self) -> ScoreRule {
        match self.kind {
            MechanismKind::SingleSampleMoments => ScoreRule::BrierMoments(2),
            MechanismKind::SingleSampleFullPpd => ScoreRule::Log,
            MechanismKind::TwoSampleDirichlet => ScoreRule::TwoSampleComposite,
        }
    }

    /// Number of outcomes the principal observes to score a report.
    pub fn principal_samples(&self) -> usize {
        self.rule().outcome_arity()
    }

    /// Truthful report of an agent holding `agent`.
    pub fn elicit(&self, agent: &Hyper) -> Result<Report> {
        self.family.validate_hyper(agent)?;
        match self.kind {
            MechanismKind::SingleSampleMoments => {
                Ok(Report::Moments(ppd_moments(self.family, agent, 2)?))
            }
            MechanismKind::SingleSampleFullPpd => {
                Ok(Report::Parametric(Belief::new(self.family, agent.clone())?))
            }
            MechanismKind::TwoSampleDirichlet => {
                let alpha = DirichletHyper::from(agent);
                Ok(Report::Composite {
                    p: alpha.mean(),
                    b: match_probability(&alpha),
                })
            }
        }
    }

    /// Recovers the hyper behind a report.
    pub fn decode(&self, report: &Report) -> Result<Hyper> {
        let moments = match (self.kind, report) {
            (MechanismKind::SingleSampleMoments, Report::Moments(r)) if r.len() == 2 => r.clone(),
            (MechanismKind::SingleSampleFullPpd, Report::Parametric(b))
                if b.family.canonical() == self.family.canonical() =>
            {
                b.moments(2)?
            }
            (MechanismKind::TwoSampleDirichlet, Report::Composite { p, b }) => {
                if p.len() != self.family.dim() {
                    return Err(Error::Arity(format!(
                        "expected {} probabilities, got {}",
                        self.family.dim(),
                        p.len()
                    )));
                }
                return Ok(invert_dirichlet_two_sample(p, *b)?.into());
            }
            _ => {
                return Err(Error::Arity(format!(
                    "{} cannot decode {report:?}",
                    self.kind.name()
                )))
            }
        };
        match self.family.canonical() {
            Family::NormalKnownVar { variance } => {
                invert_normal(moments[0], moments[1] - moments[0] * moments[0], variance)
            }
            Family::PoissonGamma => invert_poisson(moments[0], moments[1]),
            Family::UniformPareto => invert_uniform(moments[0], moments[1]),
            _ => unreachable!("checked at construction"),
        }
    }
}

/// Free-function form of [`Mechanism::elicit`].
pub fn elicit(mech: &Mechanism, agent: &Hyper) -> Result<Report> {
    mech.elicit(agent)
}

/// Free-function form of [`Mechanism::decode`].
pub fn decode(mech: &Mechanism, report: &Report) -> Result<Hyper> {
    mech.decode(report)
}

/// Normal with known variance: predictive mean `mu1` and variance `v`.
pub fn invert_normal(mu1: f64, v: f64, variance: f64) -> Result<Hyper> {
    if !(mu1.is_finite() && v.is_finite()) {
        return Err(Error::InversionDomain("moments must be finite".into()));
    }
    if v <= variance {
        return Err(Error::InversionDomain(format!(
            "predictive variance {v} must exceed the observation variance {variance}"
        )));
    }
    let n = variance / (v - variance);
    Ok(Hyper::scalar(n * mu1, n))
}

/// Poisson-Gamma: raw predictive moments `(mu1, mu2)`.
///
/// The negative binomial predictive has `mu2 - mu1^2 - mu1 = mu1 / n`.
pub fn invert_poisson(mu1: f64, mu2: f64) -> Result<Hyper> {
    if !(mu1 > 0.0 && mu1.is_finite() && mu2.is_finite()) {
        return Err(Error::InversionDomain(format!("need a positive finite mean, got {mu1}")));
    }
    let excess = mu2 - mu1 * mu1 - mu1;
    if excess <= 0.0 {
        return Err(Error::InversionDomain(format!(
            "second moment {mu2} leaves no overdispersion above mean {mu1}"
        )));
    }
    let n = mu1 / excess;
    Ok(Hyper::scalar(n * mu1, n))
}

/// Uniform-Pareto: raw predictive moments `(mu1, mu2)`.
///
/// Eliminating `nu` from `mu1 = n nu / 2(n-1)` and `mu2 = n nu^2 / 3(n-2)`
/// with `R = mu2 / mu1^2` gives `(3R - 4) n^2 + (8 - 6R) n - 4 = 0`, which
/// has exactly one positive root, and that root exceeds 2 whenever `R > 4/3`.
pub fn invert_uniform(mu1: f64, mu2: f64) -> Result<Hyper> {
    if !(mu1 > 0.0 && mu1.is_finite() && mu2.is_finite()) {
        return Err(Error::InversionDomain(format!("need a positive finite mean, got {mu1}")));
    }
    let a = (3.0 * mu2 - 4.0 * mu1 * mu1) / (mu1 * mu1);
    if a <= 0.0 {
        return Err(Error::InversionDomain(format!(
            "mu2/mu1^2 = {} must exceed 4/3 for a uniform/Pareto predictive",
            mu2 / (mu1 * mu1)
        )));
    }
    let b = 8.0 - 6.0 * (mu2 / (mu1 * mu1));
    // b < 0 here, so -b + sqrt(...) has no cancellation.
    let n = (-b + (b * b + 16.0 * a).sqrt()) / (2.0 * a);
    if !(n > 2.0 && n.is_finite()) {
        return Err(Error::InversionDomain(format!("no root with n > 2 (got {n})")));
    }
    Ok(Hyper::scalar(2.0 * mu1 * (n - 1.0) / n, n))
}

/// Two-sample Dirichlet inversion: `n = (1 - b) / (b - |p|^2)`, `alpha = n p`.
pub fn invert_dirichlet_two_sample(p: &[f64], b: f64) -> Result<DirichletHyper> {
    check_simplex(p)?;
    if !(b < 1.0) || !(b >= 0.0) {
        return Err(Error::Domain(format!("match probability must be in [0, 1), got {b}")));
    }
    let sq: f64 = p.iter().map(|v| v * v).sum();
    if b <= sq {
        return Err(Error::InversionDomain(format!(
            "match probability {b} must exceed |p|^2 = {sq}"
        )));
    }
    let n = (1.0 - b) / (b - sq);
    DirichletHyper::new(p.iter().map(|v| n * v).collect())
        .map_err(|e| Error::InversionDomain(format!("decoded pseudo-counts invalid: {e}")))
}

/// Probability that two exchangeable draws coincide under Dirichlet(alpha):
/// `sum_i Var[theta_i] + E[theta_i]^2 = (1 - |p|^2) / (n + 1) + |p|^2`.
pub fn match_probability(alpha: &DirichletHyper) -> f64 {
    let n = alpha.n();
    let sq: f64 = alpha.mean().iter().map(|v| v * v).sum();
    (1.0 - sq) / (n + 1.0) + sq
}

/// Two reachable hypers with the same predictive that nonetheless diverge
/// after a common update.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectivityWitness {
    pub first: Hyper,
    pub second: Hyper,
    /// Multisets reaching `first` and `second` from the prior.
    pub first_samples: Vec<Outcome>,
    pub second_samples: Vec<Outcome>,
    /// Sup distance between the two predictives (at most `1e-12`).
    pub ppd_difference: f64,
    pub distinguishing: Vec<Outcome>,
    /// Sup distance between the predictives after `distinguishing`.
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InjectivityProbe {
    /// No collision found within the budget.
    NoCollision { budget: usize, pairs_checked: usize },
    Witness(InjectivityWitness),
}

const SAME_PPD: f64 = 1e-12;
const DISTINCT_PPD: f64 = 1e-6;
const CONTINUOUS_PAIRS: usize = 10_000;
const COMPARE_POINTS: usize = 64;

/// Sup distance between two predictives of the same family. Discrete
/// families compare every label (or counts `0..=200`); continuous families
/// compare 64 midpoints of a window covering both.
pub fn ppd_distance(family: Family, a: &Hyper, b: &Hyper) -> f64 {
    let points = comparison_points(family, &[a, b]);
    points
        .iter()
        .map(|x| (density_unchecked(family, a, x) - density_unchecked(family, b, x)).abs())
        .fold(0.0, f64::max)
}

fn comparison_points(family: Family, hypers: &[&Hyper]) -> Vec<Outcome> {
    match family.canonical() {
        Family::CategoricalDirichlet { k } => (1..=k).map(Outcome::Category).collect(),
        Family::PoissonGamma => (0..=200).map(Outcome::Count).collect(),
        Family::NormalKnownVar { variance } => {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for h in hypers {
                let m = h.nu[0] / h.n;
                let sd = (variance * (1.0 + 1.0 / h.n)).sqrt();
                lo = lo.min(m - 6.0 * sd);
                hi = hi.max(m + 6.0 * sd);
            }
            midpoints(lo, hi)
        }
        Family::UniformPareto => {
            let top = hypers.iter().map(|h| h.nu[0]).fold(0.0, f64::max);
            midpoints(0.0, 3.0 * top)
        }
        Family::BernoulliBeta => unreachable!("canonical form"),
    }
}

fn midpoints(lo: f64, hi: f64) -> Vec<Outcome> {
    let h = (hi - lo) / COMPARE_POINTS as f64;
    (0..COMPARE_POINTS)
        .map(|i| Outcome::Real(lo + (i as f64 + 0.5) * h))
        .collect()
}

fn hypers_equal(a: &Hyper, b: &Hyper) -> bool {
    (a.n - b.n).abs() <= SAME_PPD && a.nu.iter().zip(&b.nu).all(|(x, y)| (x - y).abs() <= SAME_PPD)
}

/// Count vectors over `k` labels summing to `total`, in lexicographic order.
fn compositions(k: usize, total: usize) -> Vec<Vec<usize>> {
    fn rec(pos: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for c in (0..=left).rev() {
            cur[pos] = c;
            rec(pos + 1, left - c, cur, out);
        }
    }
    let mut out = Vec::new();
    rec(0, total, &mut vec![0; k], &mut out);
    out
}

fn counts_to_outcomes(counts: &[usize]) -> Vec<Outcome> {
    counts
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat_n(Outcome::Category(i + 1), c))
        .collect()
}

/// Candidate multisets of size `1..=budget` used to separate two hypers.
fn candidate_multisets(family: Family, budget: usize, probes: &[Outcome]) -> Vec<Vec<Outcome>> {
    match family.canonical() {
        Family::CategoricalDirichlet { k } => (1..=budget)
            .flat_map(|s| compositions(k, s))
            .map(|c| counts_to_outcomes(&c))
            .collect(),
        Family::PoissonGamma => (1..=budget)
            .flat_map(|s| (0..=budget as u64).map(move |v| vec![Outcome::Count(v); s]))
            .collect(),
        _ => probes.iter().map(|x| vec![*x]).collect(),
    }
}

/// Searches for a multiset `X1` whose update separates `a` and `b` by more
/// than `1e-6`; returns the first in enumeration order with its gap.
pub fn distinguishing_multiset(
    family: Family,
    a: &Hyper,
    b: &Hyper,
    budget: usize,
) -> Result<Option<(Vec<Outcome>, f64)>> {
    family.validate_hyper(a)?;
    family.validate_hyper(b)?;
    let probes = comparison_points(family, &[a, b]);
    for xs in candidate_multisets(family, budget.max(1), &probes) {
        let ua = batch_update(family, a, &xs)?;
        let ub = batch_update(family, b, &xs)?;
        let gap = ppd_distance(family, &ua, &ub);
        if gap > DISTINCT_PPD {
            return Ok(Some((xs, gap)));
        }
    }
    Ok(None)
}

/// Looks for two reachable hypers with identical predictives that are not
/// equivalent.
///
/// Discrete families enumerate every multiset of at most `budget` samples
/// (Poisson values are capped at `budget`); continuous families draw
/// 10,000 random pairs of multisets from the prior predictive.
pub fn probe_injectivity<R: Rng + ?Sized>(
    family: Family,
    prior: &Hyper,
    budget: usize,
    rng: &mut R,
) -> Result<InjectivityProbe> {
    family.validate_hyper(prior)?;
    let reachable: Vec<(Hyper, Vec<Outcome>)> = match family.canonical() {
        Family::CategoricalDirichlet { k } => (0..=budget)
            .flat_map(|s| compositions(k, s))
            .map(|c| {
                let xs = counts_to_outcomes(&c);
                (batch_update(family, prior, &xs), xs)
            })
            .map(|(h, xs)| h.map(|h| (h, xs)))
            .collect::<Result<_>>()?,
        Family::PoissonGamma => {
            let mut out = Vec::new();
            for size in 0..=budget {
                for total in 0..=(size * budget) as u64 {
                    let xs = poisson_multiset(size, total, budget as u64);
                    out.push((batch_update(family, prior, &xs)?, xs));
                }
            }
            out
        }
        _ => return probe_continuous(family, prior, budget, rng),
    };

    let mut pairs = 0usize;
    for i in 0..reachable.len() {
        for j in (i + 1)..reachable.len() {
            pairs += 1;
            let (a, xa) = &reachable[i];
            let (b, xb) = &reachable[j];
            if hypers_equal(a, b) {
                continue;
            }
            let diff = ppd_distance(family, a, b);
            if diff <= SAME_PPD {
                if let Some((distinguishing, discrepancy)) =
                    distinguishing_multiset(family, a, b, budget)?
                {
                    return Ok(InjectivityProbe::Witness(InjectivityWitness {
                        first: a.clone(),
                        second: b.clone(),
                        first_samples: xa.clone(),
                        second_samples: xb.clone(),
                        ppd_difference: diff,
                        distinguishing,
                        discrepancy,
                    }));
                }
            }
        }
    }
    Ok(InjectivityProbe::NoCollision { budget, pairs_checked: pairs })
}

// `size` counts in 0..=cap summing to `total`, filled greedily.
fn poisson_multiset(size: usize, total: u64, cap: u64) -> Vec<Outcome> {
    let mut left = total;
    (0..size)
        .map(|_| {
            let v = left.min(cap);
            left -= v;
            Outcome::Count(v)
        })
        .collect()
}

fn probe_continuous<R: Rng + ?Sized>(
    family: Family,
    prior: &Hyper,
    budget: usize,
    rng: &mut R,
) -> Result<InjectivityProbe> {
    let draw = |rng: &mut R| -> Result<(Hyper, Vec<Outcome>)> {
        let size = rng.random_range(0..=budget);
        let theta = sample_theta(family, prior, rng)?;
        let xs = (0..size)
            .map(|_| sample_x(family, &theta, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok((batch_update(family, prior, &xs)?, xs))
    };
    for _ in 0..CONTINUOUS_PAIRS {
        let (a, xa) = draw(rng)?;
        let (b, xb) = draw(rng)?;
        if hypers_equal(&a, &b) {
            continue;
        }
        let diff = ppd_distance(family, &a, &b);
        if diff <= SAME_PPD {
            if let Some((distinguishing, discrepancy)) = distinguishing_multiset(family, &a, &b, budget)? {
                return Ok(InjectivityProbe::Witness(InjectivityWitness {
                    first: a,
                    second: b,
                    first_samples: xa,
                    second_samples: xb,
                    ppd_difference: diff,
                    distinguishing,
                    discrepancy,
                }));
            }
        }
    }
    Ok(InjectivityProbe::NoCollision { budget, pairs_checked: CONTINUOUS_PAIRS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn normal_inversion() {
        let h = invert_normal(1.0, 1.2, 1.0).unwrap();
        assert!(rel(h.nu[0], 5.0) < 1e-12 && rel(h.n, 5.0) < 1e-12);
        let h = invert_normal(0.0, 2.0, 1.0).unwrap();
        assert_eq!(h, Hyper::scalar(0.0, 1.0));
        assert!(matches!(invert_normal(3.0, 1.0, 1.0), Err(Error::InversionDomain(_))));
    }

    #[test]
    fn poisson_inversion() {
        let h = invert_poisson(2.0, 20.0 / 3.0).unwrap();
        assert!(rel(h.nu[0], 6.0) < 1e-12 && rel(h.n, 3.0) < 1e-12);
        // (nu, n) = (1, 1): mu1 = 1, mu2 = 1 * 3 / 1 = 3.
        let h = invert_poisson(1.0, 3.0).unwrap();
        assert!(rel(h.nu[0], 1.0) < 1e-12 && rel(h.n, 1.0) < 1e-12);
        assert!(matches!(invert_poisson(1.0, 1.0), Err(Error::InversionDomain(_))));
        assert!(matches!(invert_poisson(1.0, 2.0), Err(Error::InversionDomain(_))));
    }

    #[test]
    fn uniform_inversion() {
        let h = invert_uniform(16.0 / 6.0, 64.0 / 6.0).unwrap();
        assert!(rel(h.nu[0], 4.0) < 1e-12 && rel(h.n, 4.0) < 1e-12);
        assert!(matches!(invert_uniform(1.0, 0.1), Err(Error::InversionDomain(_))));
        assert!(matches!(invert_uniform(1.0, 4.0 / 3.0), Err(Error::InversionDomain(_))));
    }

    #[test]
    fn dirichlet_two_sample_anchor() {
        let b = (1.0 - 0.36) / 21.0 + 0.36;
        let alpha = invert_dirichlet_two_sample(&[0.4, 0.4, 0.2], b).unwrap();
        for (a, e) in alpha.alpha.iter().zip([8.0, 8.0, 4.0]) {
            assert!(rel(*a, e) < 1e-10);
        }
        assert!(rel(alpha.n(), 20.0) < 1e-10);
        assert!((b - 0.390_476_190_476).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_two_sample_errors() {
        assert!(matches!(
            invert_dirichlet_two_sample(&[0.5, 0.5], 0.25),
            Err(Error::InversionDomain(_))
        ));
        assert!(matches!(invert_dirichlet_two_sample(&[0.5, 0.5], 1.0), Err(Error::Domain(_))));
        assert!(invert_dirichlet_two_sample(&[0.5, 0.6], 0.5).is_err());
    }

    #[test]
    fn match_probability_values() {
        let b = match_probability(&DirichletHyper::new(vec![1.0, 1.0]).unwrap());
        assert!((b - 2.0 / 3.0).abs() < 1e-15);
        let b = match_probability(&DirichletHyper::new(vec![1000.0, 1000.0]).unwrap());
        assert!((b - (0.5 + 0.5 / 2001.0)).abs() < 1e-15);
    }

    #[test]
    fn single_sample_rejected_for_categorical() {
        let prior = Hyper::new(vec![1.0, 1.0, 1.0], 3.0);
        for kind in [MechanismKind::SingleSampleMoments, MechanismKind::SingleSampleFullPpd] {
            let err = Mechanism::new(kind, Family::categorical(3), prior.clone()).unwrap_err();
            assert!(matches!(err, Error::Config(ref m) if m.contains("scaling alpha")));
        }
        let err = Mechanism::new(
            MechanismKind::TwoSampleDirichlet,
            Family::PoissonGamma,
            Hyper::scalar(1.0, 1.0),
        );
        assert!(err.is_err());
    }

    #[test]
    fn elicit_examples() {
        let m = Mechanism::new(
            MechanismKind::TwoSampleDirichlet,
            Family::categorical(3),
            Hyper::new(vec![1.0, 1.0, 1.0], 3.0),
        )
        .unwrap();
        match m.elicit(&Hyper::new(vec![8.0, 8.0, 4.0], 20.0)).unwrap() {
            Report::Composite { p, b } => {
                assert_eq!(p, vec![0.4, 0.4, 0.2]);
                assert!((b - 0.390_476_190_476_190_5).abs() < 1e-15);
            }
            r => panic!("unexpected {r:?}"),
        }

        let m = Mechanism::new(
            MechanismKind::SingleSampleMoments,
            Family::PoissonGamma,
            Hyper::scalar(1.0, 1.0),
        )
        .unwrap();
        match m.elicit(&Hyper::scalar(6.0, 3.0)).unwrap() {
            Report::Moments(r) => {
                assert!((r[0] - 2.0).abs() < 1e-15 && (r[1] - 20.0 / 3.0).abs() < 1e-14)
            }
            r => panic!("unexpected {r:?}"),
        }

        let prior = Hyper::scalar(0.0, 1.0);
        let m = Mechanism::new(MechanismKind::SingleSampleMoments, Family::normal(), prior.clone())
            .unwrap();
        assert_eq!(
            m.elicit(&prior).unwrap(),
            Report::Moments(ppd_moments(Family::normal(), &prior, 2).unwrap())
        );
    }

    #[test]
    fn decode_round_trips() {
        let cases = [
            (
                MechanismKind::TwoSampleDirichlet,
                Family::categorical(3),
                Hyper::new(vec![1.0, 1.0, 1.0], 3.0),
                Hyper::new(vec![8.0, 8.0, 4.0], 20.0),
            ),
            (
                MechanismKind::SingleSampleMoments,
                Family::PoissonGamma,
                Hyper::scalar(1.0, 1.0),
                Hyper::scalar(6.0, 3.0),
            ),
            (
                MechanismKind::SingleSampleMoments,
                Family::UniformPareto,
                Hyper::scalar(2.0, 3.0),
                Hyper::scalar(4.0, 4.0),
            ),
            (
                MechanismKind::SingleSampleFullPpd,
                Family::UniformPareto,
                Hyper::scalar(2.0, 3.0),
                Hyper::scalar(4.0, 4.0),
            ),
        ];
        for (kind, family, prior, h) in cases {
            let m = Mechanism::new(kind, family, prior).unwrap();
            let back = m.decode(&m.elicit(&h).unwrap()).unwrap();
            assert!(rel(back.n, h.n) < 1e-10);
            for (a, b) in back.nu.iter().zip(&h.nu) {
                assert!(rel(*a, *b) < 1e-10);
            }
        }
    }

    #[test]
    fn decode_rejects_mismatched_report() {
        let m = Mechanism::new(
            MechanismKind::SingleSampleMoments,
            Family::PoissonGamma,
            Hyper::scalar(1.0, 1.0),
        )
        .unwrap();
        assert!(m.decode(&Report::Moments(vec![1.0])).is_err());
        assert!(m.decode(&Report::Composite { p: vec![0.5, 0.5], b: 0.6 }).is_err());
    }

    #[test]
    fn compositions_cover_simplex() {
        assert_eq!(compositions(3, 2).len(), 6);
        assert_eq!(compositions(2, 0), vec![vec![0, 0]]);
    }

    #[test]
    fn poisson_and_normal_probes_find_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = probe_injectivity(Family::PoissonGamma, &Hyper::scalar(1.0, 1.0), 6, &mut rng).unwrap();
        assert!(matches!(p, InjectivityProbe::NoCollision { budget: 6, .. }));
        let p = probe_injectivity(Family::normal(), &Hyper::scalar(0.0, 1.0), 6, &mut rng).unwrap();
        assert!(matches!(p, InjectivityProbe::NoCollision { budget: 6, .. }));
    }
}
