//! The five supported observation-family / conjugate-prior pairs.
//!
//! Every family is described by a [`Family`] tag plus a hyperparameter pair
//! [`Hyper`] `(nu, n)`. Observing `x` moves the hyper to `(nu + phi(x), n + 1)`
//! for the linear families, and to `(max(nu, x), n + 1)` for the
//! uniform/Pareto pair.
//!
//! | family                | outcome             | phi(x)         | prior on theta            |
//! |-----------------------|---------------------|----------------|---------------------------|
//! | `NormalKnownVar`      | real                | x              | N(nu/n, s2/n)             |
//! | `PoissonGamma`        | count 0, 1, 2, ...  | x              | Gamma(shape nu, rate n)   |
//! | `UniformPareto`       | real in [0, theta]  | max-update     | Pareto(shape n, scale nu) |
//! | `CategoricalDirichlet`| index 1..=K         | indicator e_x  | Dirichlet(alpha = nu)     |
//! | `BernoulliBeta`       | index 1..=2         | indicator e_x  | Beta(alpha_1, alpha_2)    |
//!
//! For the categorical families `nu` holds the full pseudo-count vector
//! `alpha` and `n` is kept equal to its sum.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal, Poisson};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Family tag plus its fixed constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "constants")]
pub enum Family {
    /// Normal observations with known variance and unknown mean.
    NormalKnownVar { variance: f64 },
    /// Poisson counts with a Gamma prior on the rate.
    PoissonGamma,
    /// Uniform on `[0, theta]` with a Pareto prior on `theta`.
    UniformPareto,
    /// Categorical outcomes over `k` labels with a Dirichlet prior.
    CategoricalDirichlet { k: usize },
    /// Two-outcome alias of `CategoricalDirichlet { k: 2 }`.
    BernoulliBeta,
}

impl Family {
    pub fn normal() -> Self {
        Family::NormalKnownVar { variance: 1.0 }
    }

    pub fn categorical(k: usize) -> Self {
        Family::CategoricalDirichlet { k }
    }

    /// Collapses the Bernoulli alias onto its categorical form.
    pub fn canonical(self) -> Family {
        match self {
            Family::BernoulliBeta => Family::CategoricalDirichlet { k: 2 },
            other => other,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::NormalKnownVar { .. } => "NormalKnownVar",
            Family::PoissonGamma => "PoissonGamma",
            Family::UniformPareto => "UniformPareto",
            Family::CategoricalDirichlet { .. } => "CategoricalDirichlet",
            Family::BernoulliBeta => "BernoulliBeta",
        }
    }

    /// Number of outcome labels for the categorical families.
    pub fn categories(&self) -> Option<usize> {
        match self.canonical() {
            Family::CategoricalDirichlet { k } => Some(k),
            _ => None,
        }
    }

    pub fn is_categorical(&self) -> bool {
        self.categories().is_some()
    }

    /// Length of the `nu` vector.
    pub fn dim(&self) -> usize {
        self.categories().unwrap_or(1)
    }

    /// True when every reachable `nu - nu0` is integer valued.
    pub fn integer_statistic(&self) -> bool {
        matches!(
            self.canonical(),
            Family::PoissonGamma | Family::CategoricalDirichlet { .. }
        )
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Family::NormalKnownVar { variance } if !(variance > 0.0 && variance.is_finite()) => {
                Err(Error::Domain(format!("observation variance must be > 0, got {variance}")))
            }
            Family::CategoricalDirichlet { k } if k < 2 => {
                Err(Error::Domain(format!("categorical family needs k >= 2, got {k}")))
            }
            _ => Ok(()),
        }
    }

    pub fn validate_hyper(&self, h: &Hyper) -> Result<()> {
        self.validate()?;
        if !(h.n > 0.0 && h.n.is_finite()) {
            return Err(Error::Domain(format!("n must be finite and > 0, got {}", h.n)));
        }
        if h.nu.len() != self.dim() {
            return Err(Error::Domain(format!(
                "{} expects nu of length {}, got {}",
                self.name(),
                self.dim(),
                h.nu.len()
            )));
        }
        if h.nu.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("nu must be finite".into()));
        }
        match self.canonical() {
            Family::PoissonGamma | Family::UniformPareto if h.nu[0] <= 0.0 => Err(Error::Domain(
                format!("{} needs nu > 0, got {}", self.name(), h.nu[0]),
            )),
            Family::CategoricalDirichlet { .. } => {
                if h.nu.iter().any(|&a| a <= 0.0) {
                    return Err(Error::Domain("Dirichlet pseudo-counts must be > 0".into()));
                }
                let total: f64 = h.nu.iter().sum();
                if (total - h.n).abs() > 1e-9 * h.n.max(1.0) {
                    return Err(Error::Domain(format!(
                        "Dirichlet n must equal sum(alpha): {} vs {}",
                        h.n, total
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn check_outcome(&self, x: &Outcome) -> Result<()> {
        let ok = match (self.canonical(), x) {
            (Family::NormalKnownVar { .. }, Outcome::Real(v)) => v.is_finite(),
            (Family::UniformPareto, Outcome::Real(v)) => v.is_finite() && *v >= 0.0,
            (Family::PoissonGamma, Outcome::Count(_)) => true,
            (Family::CategoricalDirichlet { k }, Outcome::Category(i)) => (1..=k).contains(i),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("{x:?} is outside the outcome space of {}", self.name())))
        }
    }
}

/// Conjugate-prior hyperparameters `(nu, n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyper {
    pub nu: Vec<f64>,
    pub n: f64,
}

impl Hyper {
    pub fn new(nu: Vec<f64>, n: f64) -> Self {
        Hyper { nu, n }
    }

    /// One-dimensional hyper for the Normal, Poisson and uniform families.
    pub fn scalar(nu: f64, n: f64) -> Self {
        Hyper { nu: vec![nu], n }
    }

    /// Scales both components; a categorical PPD is unchanged by this.
    pub fn scaled(&self, c: f64) -> Self {
        Hyper {
            nu: self.nu.iter().map(|v| v * c).collect(),
            n: self.n * c,
        }
    }
}

/// Dirichlet pseudo-counts `alpha`; `n` is the sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletHyper {
    pub alpha: Vec<f64>,
}

impl DirichletHyper {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::Domain("Dirichlet needs at least two outcomes".into()));
        }
        if alpha.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::Domain(format!("pseudo-counts must be > 0, got {alpha:?}")));
        }
        Ok(DirichletHyper { alpha })
    }

    pub fn n(&self) -> f64 {
        self.alpha.iter().sum()
    }

    /// Predictive probabilities `alpha / n`.
    pub fn mean(&self) -> Vec<f64> {
        let n = self.n();
        self.alpha.iter().map(|a| a / n).collect()
    }
}

impl From<DirichletHyper> for Hyper {
    fn from(d: DirichletHyper) -> Self {
        let n = d.n();
        Hyper { nu: d.alpha, n }
    }
}

impl From<&Hyper> for DirichletHyper {
    fn from(h: &Hyper) -> Self {
        DirichletHyper { alpha: h.nu.clone() }
    }
}

/// Serialized form of a hyper: `{nu, n}` or `{alpha}` for the categorical
/// families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HyperRepr {
    Dirichlet { alpha: Vec<f64> },
    Linear { nu: Vec<f64>, n: f64 },
}

impl HyperRepr {
    pub fn encode(family: Family, h: &Hyper) -> Self {
        if family.is_categorical() {
            HyperRepr::Dirichlet { alpha: h.nu.clone() }
        } else {
            HyperRepr::Linear { nu: h.nu.clone(), n: h.n }
        }
    }

    pub fn to_hyper(&self) -> Hyper {
        match self {
            HyperRepr::Dirichlet { alpha } => Hyper::new(alpha.clone(), alpha.iter().sum()),
            HyperRepr::Linear { nu, n } => Hyper::new(nu.clone(), *n),
        }
    }
}

/// A single observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    Real(f64),
    Count(u64),
    /// 1-based label in `1..=K`.
    Category(usize),
}

impl Outcome {
    /// Numeric value for moment-based rules; category labels have none.
    pub fn value(&self) -> Option<f64> {
        match *self {
            Outcome::Real(v) => Some(v),
            Outcome::Count(c) => Some(c as f64),
            Outcome::Category(_) => None,
        }
    }
}

/// Validated multiset of outcomes from one family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    family: Family,
    samples: Vec<Outcome>,
}

impl SampleSet {
    pub fn new(family: Family, samples: Vec<Outcome>) -> Result<Self> {
        for x in &samples {
            family.check_outcome(x)?;
        }
        Ok(SampleSet { family, samples })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn samples(&self) -> &[Outcome] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Multiset sum.
    pub fn union(&self, other: &SampleSet) -> Result<SampleSet> {
        if self.family.canonical() != other.family.canonical() {
            return Err(Error::Domain("cannot merge samples from different families".into()));
        }
        let mut samples = self.samples.clone();
        samples.extend_from_slice(&other.samples);
        Ok(SampleSet { family: self.family, samples })
    }
}

/// A draw of the observation-model parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Theta {
    Mean(f64),
    Rate(f64),
    Upper(f64),
    Probs(Vec<f64>),
}

pub fn posterior_update(family: Family, h: &Hyper, x: &Outcome) -> Result<Hyper> {
    family.validate_hyper(h)?;
    family.check_outcome(x)?;
    Ok(update_unchecked(family, h, x))
}

fn update_unchecked(family: Family, h: &Hyper, x: &Outcome) -> Hyper {
    let mut next = h.clone();
    next.n += 1.0;
    match (family.canonical(), *x) {
        (Family::NormalKnownVar { .. }, Outcome::Real(v)) => next.nu[0] += v,
        (Family::PoissonGamma, Outcome::Count(c)) => next.nu[0] += c as f64,
        (Family::UniformPareto, Outcome::Real(v)) => next.nu[0] = next.nu[0].max(v),
        (Family::CategoricalDirichlet { .. }, Outcome::Category(i)) => next.nu[i - 1] += 1.0,
        _ => unreachable!("outcome checked against family"),
    }
    next
}

/// Same result as folding [`posterior_update`] over `xs`. Statistics are
/// summed before they touch `h`, so count-valued families are exact under
/// any ordering of `xs`.
pub fn batch_update(family: Family, h: &Hyper, xs: &[Outcome]) -> Result<Hyper> {
    family.validate_hyper(h)?;
    for x in xs {
        family.check_outcome(x)?;
    }
    let mut next = h.clone();
    next.n += xs.len() as f64;
    match family.canonical() {
        Family::NormalKnownVar { .. } => {
            next.nu[0] += xs.iter().filter_map(Outcome::value).sum::<f64>();
        }
        Family::PoissonGamma => {
            let total: u64 = xs
                .iter()
                .map(|x| match x {
                    Outcome::Count(c) => *c,
                    _ => 0,
                })
                .sum();
            next.nu[0] += total as f64;
        }
        Family::UniformPareto => {
            next.nu[0] = xs.iter().filter_map(Outcome::value).fold(next.nu[0], f64::max);
        }
        Family::CategoricalDirichlet { k } => {
            let mut counts = vec![0u64; k];
            for x in xs {
                if let Outcome::Category(i) = x {
                    counts[i - 1] += 1;
                }
            }
            for (a, c) in next.nu.iter_mut().zip(counts) {
                *a += c as f64;
            }
        }
        Family::BernoulliBeta => unreachable!("canonical form"),
    }
    Ok(next)
}

/// Density (continuous) or mass (discrete) of the posterior predictive.
pub fn ppd_density(family: Family, h: &Hyper, x: &Outcome) -> Result<f64> {
    family.validate_hyper(h)?;
    family.check_outcome(x)?;
    Ok(density_unchecked(family, h, x))
}

pub(crate) fn density_unchecked(family: Family, h: &Hyper, x: &Outcome) -> f64 {
    let nu = h.nu[0];
    let n = h.n;
    match (family.canonical(), *x) {
        (Family::NormalKnownVar { variance }, Outcome::Real(v)) => {
            let var = variance * (1.0 + 1.0 / n);
            let z = v - nu / n;
            (-(z * z) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
        }
        (Family::PoissonGamma, Outcome::Count(c)) => {
            // Negative binomial with r = nu, success probability n / (n + 1).
            let c = c as f64;
            let log_p = ln_gamma(c + nu) - ln_gamma(nu) - ln_gamma(c + 1.0)
                + nu * (n / (n + 1.0)).ln()
                - c * (n + 1.0).ln();
            log_p.exp()
        }
        (Family::UniformPareto, Outcome::Real(v)) => {
            // n/(n+1) Uniform[0, nu] + 1/(n+1) Pareto(shape n, scale nu).
            let base = n / ((n + 1.0) * nu);
            if v <= nu {
                base
            } else {
                base * (nu / v).powf(n + 1.0)
            }
        }
        (Family::CategoricalDirichlet { .. }, Outcome::Category(i)) => h.nu[i - 1] / n,
        _ => unreachable!("outcome checked against family"),
    }
}

/// First `k` raw moments of the PPD, `k` in `{1, 2}`.
pub fn ppd_moments(family: Family, h: &Hyper, k: usize) -> Result<Vec<f64>> {
    family.validate_hyper(h)?;
    if !(1..=2).contains(&k) {
        return Err(Error::Precondition(format!("moment order must be 1 or 2, got {k}")));
    }
    let nu = h.nu[0];
    let n = h.n;
    let (m1, m2) = match family.canonical() {
        Family::NormalKnownVar { variance } => {
            let mean = nu / n;
            (mean, variance * (1.0 + 1.0 / n) + mean * mean)
        }
        Family::PoissonGamma => (nu / n, nu * (nu + n + 1.0) / (n * n)),
        Family::UniformPareto => {
            if n <= 1.0 || (k == 2 && n <= 2.0) {
                return Err(Error::Precondition(format!(
                    "uniform/Pareto moment of order {k} needs n > {k}, got n = {n}"
                )));
            }
            let m2 = if k == 2 { n * nu * nu / (3.0 * (n - 2.0)) } else { f64::NAN };
            (n * nu / (2.0 * (n - 1.0)), m2)
        }
        Family::CategoricalDirichlet { .. } | Family::BernoulliBeta => {
            return Err(Error::Precondition(
                "categorical outcomes are labels and have no moments".into(),
            ))
        }
    };
    Ok(if k == 1 { vec![m1] } else { vec![m1, m2] })
}

pub fn sample_theta<R: Rng + ?Sized>(family: Family, h: &Hyper, rng: &mut R) -> Result<Theta> {
    family.validate_hyper(h)?;
    let nu = h.nu[0];
    let n = h.n;
    Ok(match family.canonical() {
        Family::NormalKnownVar { variance } => {
            let d = Normal::new(nu / n, (variance / n).sqrt()).map_err(dist_err)?;
            Theta::Mean(d.sample(rng))
        }
        Family::PoissonGamma => {
            let d = Gamma::new(nu, 1.0 / n).map_err(dist_err)?;
            Theta::Rate(d.sample(rng))
        }
        Family::UniformPareto => {
            // Inverse CDF of Pareto(shape n, scale nu).
            let u: f64 = 1.0 - rng.random::<f64>();
            Theta::Upper(nu * u.powf(-1.0 / n))
        }
        Family::CategoricalDirichlet { .. } | Family::BernoulliBeta => {
            let mut draws = Vec::with_capacity(h.nu.len());
            for &a in &h.nu {
                draws.push(Gamma::new(a, 1.0).map_err(dist_err)?.sample(rng));
            }
            let total: f64 = draws.iter().sum();
            Theta::Probs(draws.into_iter().map(|g| g / total).collect())
        }
    })
}

pub fn sample_x<R: Rng + ?Sized>(family: Family, theta: &Theta, rng: &mut R) -> Result<Outcome> {
    family.validate()?;
    match (family.canonical(), theta) {
        (Family::NormalKnownVar { variance }, Theta::Mean(m)) => {
            let d = Normal::new(*m, variance.sqrt()).map_err(dist_err)?;
            Ok(Outcome::Real(d.sample(rng)))
        }
        (Family::PoissonGamma, Theta::Rate(l)) => {
            if *l <= 0.0 {
                // Gamma draws can underflow to zero; the count is then 0.
                return Ok(Outcome::Count(0));
            }
            let d = Poisson::new(*l).map_err(dist_err)?;
            Ok(Outcome::Count(d.sample(rng) as u64))
        }
        (Family::UniformPareto, Theta::Upper(t)) if *t > 0.0 => {
            Ok(Outcome::Real(rng.random::<f64>() * t))
        }
        (Family::CategoricalDirichlet { k }, Theta::Probs(p)) if p.len() == k => {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (i, &pi) in p.iter().enumerate() {
                acc += pi;
                if u < acc {
                    return Ok(Outcome::Category(i + 1));
                }
            }
            // Rounding left u above the running sum; take the last label with mass.
            let last = p.iter().rposition(|&pi| pi > 0.0).unwrap_or(k - 1);
            Ok(Outcome::Category(last + 1))
        }
        _ => Err(Error::Domain(format!("{theta:?} is not a parameter of {}", family.name()))),
    }
}

fn dist_err<E: std::fmt::Display>(e: E) -> Error {
    Error::Domain(e.to_string())
}

/// An agent's predictive belief: family plus hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Belief {
    pub family: Family,
    pub hyper: Hyper,
}

impl Belief {
    pub fn new(family: Family, hyper: Hyper) -> Result<Self> {
        family.validate_hyper(&hyper)?;
        Ok(Belief { family, hyper })
    }

    pub fn density(&self, x: &Outcome) -> Result<f64> {
        self.family.check_outcome(x)?;
        Ok(density_unchecked(self.family, &self.hyper, x))
    }

    pub fn moments(&self, k: usize) -> Result<Vec<f64>> {
        ppd_moments(self.family, &self.hyper, k)
    }

    /// Predictive probability vector for categorical beliefs.
    pub fn probabilities(&self) -> Option<Vec<f64>> {
        self.family.categories()?;
        Some(self.hyper.nu.iter().map(|a| a / self.hyper.n).collect())
    }
}
