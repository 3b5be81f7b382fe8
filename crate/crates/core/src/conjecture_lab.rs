//! Finite-support exponential families and numerical evidence about when a
//! single predictive report identifies the conjugate hyperparameters.
//!
//! A family is a statistic matrix `phi` (one row per outcome, `k <= 2`
//! columns) with `p(x | theta) = exp(<theta, phi(x)> - g(theta))`. Its
//! conjugate prior `p(theta | nu, n) ~ exp(<theta, nu> - n g(theta))` is
//! integrated on a trapezoid grid whose axes follow the prior's curvature
//! at its mode. The window grows until the log-weight on every face is 40
//! below the peak, and the prior is non-normalizable (on the box) if the
//! box boundary comes within 25 of the peak.
//!
//! Nothing here proves anything. The sweeps produce tables of distances and
//! flags that are read as evidence.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoring::pair_distribution;

/// Grid points per dimension of the fine quadrature pass.
pub const DEFAULT_POINTS: usize = 201;
/// Distance threshold separating "same" from "different" predictives.
pub const SWEEP_TOL: f64 = 1e-6;

const WINDOW_DROP: f64 = 40.0;
const EDGE_DROP: f64 = 25.0;
const PSD_TOL: f64 = 1e-9;

/// A minimal finite exponential family with a bounded parameter box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteExpFamily {
    pub name: String,
    /// `phi[x][j]`: statistic `j` of outcome `x`.
    pub phi: Vec<Vec<f64>>,
    /// Half-width of the box `[-bound, bound]^k` holding `theta`.
    pub bound: f64,
    pub points: usize,
}

impl FiniteExpFamily {
    /// Rejects non-minimal statistics: `[phi | 1]` must have rank `k + 1`.
    pub fn new(name: impl Into<String>, phi: Vec<Vec<f64>>, bound: f64) -> Result<Self> {
        let name = name.into();
        let k = phi.first().map_or(0, Vec::len);
        if phi.len() < 2 || phi.iter().any(|r| r.len() != k) {
            return Err(Error::Domain(format!("{name}: phi must be a |X| x k matrix, |X| >= 2")));
        }
        if !(1..=2).contains(&k) {
            return Err(Error::Domain(format!("{name}: statistic dimension {k} outside 1..=2")));
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::Domain(format!("{name}: box half-width must be > 0")));
        }
        let aug = DMatrix::from_fn(phi.len(), k + 1, |r, c| if c < k { phi[r][c] } else { 1.0 });
        let rank = aug.svd(false, false).rank(1e-10);
        if rank != k + 1 {
            return Err(Error::Domain(format!(
                "{name}: statistic is not minimal (rank of [phi | 1] is {rank}, need {})",
                k + 1
            )));
        }
        Ok(FiniteExpFamily { name, phi, bound, points: DEFAULT_POINTS })
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points.max(3);
        self
    }

    pub fn outcomes(&self) -> usize {
        self.phi.len()
    }

    pub fn dim(&self) -> usize {
        self.phi[0].len()
    }

    /// `dim phi = |X| - 1`: a reparameterized categorical.
    pub fn full_dimensional(&self) -> bool {
        self.dim() + 1 == self.outcomes()
    }

    fn dot(&self, theta: &[f64], x: usize) -> f64 {
        self.phi[x].iter().zip(theta).map(|(a, b)| a * b).sum()
    }

    /// `g(theta) = log sum_x exp <theta, phi(x)>`.
    pub fn cumulant(&self, theta: &[f64]) -> f64 {
        let s: Vec<f64> = (0..self.outcomes()).map(|x| self.dot(theta, x)).collect();
        let m = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        m + s.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
    }

    /// `p(x | theta)` for every outcome.
    pub fn likelihood(&self, theta: &[f64]) -> Vec<f64> {
        let s: Vec<f64> = (0..self.outcomes()).map(|x| self.dot(theta, x)).collect();
        let m = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = s.iter().map(|v| (v - m).exp()).collect();
        let z: f64 = e.iter().sum();
        e.into_iter().map(|v| v / z).collect()
    }

    /// `grad g(theta) = E[phi | theta]`, the softmax-weighted mean of `phi`.
    pub fn grad_cumulant(&self, theta: &[f64]) -> Vec<f64> {
        self.mean_of(&self.likelihood(theta))
    }

    /// `sum_x p[x] phi(x)`.
    pub fn mean_of(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (x, px) in p.iter().enumerate() {
            for (o, f) in out.iter_mut().zip(&self.phi[x]) {
                *o += px * f;
            }
        }
        out
    }

    /// `Cov[phi | theta]`, the Hessian of `g`.
    fn hessian(&self, theta: &[f64]) -> DMatrix<f64> {
        let p = self.likelihood(theta);
        let m = self.mean_of(&p);
        let k = self.dim();
        DMatrix::from_fn(k, k, |i, j| {
            p.iter()
                .enumerate()
                .map(|(x, px)| px * (self.phi[x][i] - m[i]) * (self.phi[x][j] - m[j]))
                .sum()
        })
    }

    /// Natural parameter with `grad g(theta) = mu`, found by damped Newton
    /// on the concave `<theta, mu> - g(theta)`.
    pub fn natural_mode(&self, mu: &[f64]) -> Result<Vec<f64>> {
        let k = self.dim();
        if mu.len() != k || mu.iter().any(|v| !v.is_finite()) {
            return Err(Error::Unrealizable(format!("mean {mu:?} has the wrong shape")));
        }
        let objective = |t: &[f64]| mu.iter().zip(t).map(|(a, b)| a * b).sum::<f64>() - self.cumulant(t);
        let residual = |t: &[f64]| {
            mu.iter()
                .zip(self.grad_cumulant(t))
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        let mut theta = vec![0.0; k];
        for _ in 0..200 {
            let grad: Vec<f64> = mu.iter().zip(self.grad_cumulant(&theta)).map(|(a, b)| a - b).collect();
            let r0 = grad.iter().map(|v| v.abs()).fold(0.0, f64::max);
            if r0 < 1e-14 {
                return Ok(theta);
            }
            let step = self
                .hessian(&theta)
                .lu()
                .solve(&DVector::from_vec(grad.clone()))
                .ok_or_else(|| Error::Unrealizable(format!("mean {mu:?} sits on the boundary")))?;
            let f0 = objective(&theta);
            let mut t = 1.0;
            let mut moved = false;
            while t > 1e-12 {
                let cand: Vec<f64> = theta.iter().zip(step.iter()).map(|(a, s)| a + t * s).collect();
                // Near the optimum objective gains drop below rounding; the
                // residual still certifies progress.
                if objective(&cand) >= f0 || residual(&cand) < 0.5 * r0 {
                    theta = cand;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if !moved || theta.iter().any(|v| v.abs() > self.bound) {
                break;
            }
        }
        if residual(&theta) < 1e-10 && theta.iter().all(|v| v.abs() <= self.bound) {
            Ok(theta)
        } else {
            Err(Error::Unrealizable(format!(
                "mean {mu:?} is not E[phi | theta] for any theta in the box"
            )))
        }
    }
}

/// Conjugate hyperparameters of a [`FiniteExpFamily`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpFamHyper {
    pub nu: Vec<f64>,
    pub n: f64,
}

impl ExpFamHyper {
    pub fn new(nu: Vec<f64>, n: f64) -> Self {
        ExpFamHyper { nu, n }
    }

    /// `(n mu, n)`.
    pub fn from_mean(mu: &[f64], n: f64) -> Self {
        ExpFamHyper { nu: mu.iter().map(|m| m * n).collect(), n }
    }

    pub fn mean(&self) -> Vec<f64> {
        self.nu.iter().map(|v| v / self.n).collect()
    }
}

/// Normalized trapezoid weights of the prior over a tensor grid.
struct PriorGrid {
    thetas: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

fn log_weight(fam: &FiniteExpFamily, h: &ExpFamHyper, theta: &[f64]) -> f64 {
    h.nu.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>() - h.n * fam.cumulant(theta)
}

fn linspace(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect()
}

fn in_box(fam: &FiniteExpFamily, theta: &[f64]) -> bool {
    theta.iter().all(|v| v.abs() <= fam.bound)
}

// Whitened coordinates around the mode: theta = mode + sum_i z_i scale_i dir_i.
struct Frame {
    mode: Vec<f64>,
    scale: Vec<f64>,
    dir: Vec<Vec<f64>>,
}

impl Frame {
    fn theta(&self, z: &[f64]) -> Vec<f64> {
        let mut t = self.mode.clone();
        for (i, zi) in z.iter().enumerate() {
            for (tj, dj) in t.iter_mut().zip(&self.dir[i]) {
                *tj += zi * self.scale[i] * dj;
            }
        }
        t
    }
}

// Largest in-box log-weight on the face `z[axis] = at`, or `None` when the
// whole face lies outside the box.
fn face_max(
    fam: &FiniteExpFamily,
    h: &ExpFamHyper,
    frame: &Frame,
    lo: &[f64],
    hi: &[f64],
    axis: usize,
    at: f64,
) -> Option<f64> {
    let k = fam.dim();
    let along: Vec<Vec<f64>> = if k == 1 {
        vec![vec![at]]
    } else {
        let other = 1 - axis;
        linspace(lo[other], hi[other], fam.points)
            .into_iter()
            .map(|v| {
                let mut z = vec![0.0; 2];
                z[axis] = at;
                z[other] = v;
                z
            })
            .collect()
    };
    along
        .iter()
        .map(|z| frame.theta(z))
        .filter(|t| in_box(fam, t))
        .map(|t| log_weight(fam, h, &t))
        .reduce(f64::max)
}

// Largest log-weight on the boundary of the box.
fn box_edge_max(fam: &FiniteExpFamily, h: &ExpFamHyper) -> f64 {
    let b = fam.bound;
    if fam.dim() == 1 {
        return log_weight(fam, h, &[-b]).max(log_weight(fam, h, &[b]));
    }
    let mut best = f64::NEG_INFINITY;
    for v in linspace(-b, b, 4001) {
        for t in [[v, -b], [v, b], [-b, v], [b, v]] {
            best = best.max(log_weight(fam, h, &t));
        }
    }
    best
}

// Trapezoid spacing (in theta) along a direction whose statistic spans
// `range`. The integrand has singularities at imaginary distance about
// pi / range, and this keeps the aliasing error near exp(-40).
fn max_spacing(range: f64) -> f64 {
    2.0 * std::f64::consts::PI * std::f64::consts::PI / (WINDOW_DROP * range.max(1e-12))
}

const MAX_AXIS_POINTS: usize = 20_001;

fn prior_grid(fam: &FiniteExpFamily, h: &ExpFamHyper) -> Result<PriorGrid> {
    let k = fam.dim();
    if h.nu.len() != k || !(h.n > 0.0 && h.n.is_finite()) {
        return Err(Error::Domain(format!("hyper {h:?} does not fit {}", fam.name)));
    }
    let mode = fam.natural_mode(&h.mean()).map_err(|e| {
        Error::NonNormalizable(format!("nu/n = {:?} has no interior mode: {e}", h.mean()))
    })?;
    let peak = log_weight(fam, h, &mode);
    let edge = box_edge_max(fam, h);
    if edge > peak - EDGE_DROP {
        return Err(Error::NonNormalizable(format!(
            "prior mass reaches the box edge (log-weight {:.3} below the peak; nu = {:?}, n = {})",
            peak - edge,
            h.nu,
            h.n
        )));
    }

    let eig = SymmetricEigen::new(fam.hessian(&mode) * h.n);
    let frame = Frame {
        mode: mode.clone(),
        scale: eig.eigenvalues.iter().map(|l| 1.0 / l.max(1e-300).sqrt()).collect(),
        dir: (0..k).map(|i| eig.eigenvectors.column(i).iter().copied().collect()).collect(),
    };

    let start = 1.5 * (2.0 * WINDOW_DROP).sqrt();
    let mut lo = vec![-start; k];
    let mut hi = vec![start; k];
    let mut settled = false;
    for _ in 0..200 {
        let mut grew = false;
        for i in 0..k {
            if face_max(fam, h, &frame, &lo, &hi, i, lo[i]).is_some_and(|m| m > peak - WINDOW_DROP) {
                lo[i] *= 1.5;
                grew = true;
            }
            if face_max(fam, h, &frame, &lo, &hi, i, hi[i]).is_some_and(|m| m > peak - WINDOW_DROP) {
                hi[i] *= 1.5;
                grew = true;
            }
        }
        if !grew {
            settled = true;
            break;
        }
    }
    if !settled {
        return Err(Error::NonNormalizable(format!(
            "quadrature window did not close (nu = {:?}, n = {})",
            h.nu, h.n
        )));
    }

    let axes: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let proj: Vec<f64> = fam
                .phi
                .iter()
                .map(|row| row.iter().zip(&frame.dir[i]).map(|(a, b)| a * b).sum())
                .collect();
            let range = proj.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                - proj.iter().copied().fold(f64::INFINITY, f64::min);
            let span = (hi[i] - lo[i]) * frame.scale[i];
            let needed = (span / max_spacing(range)).ceil() as usize + 1;
            linspace(lo[i], hi[i], needed.clamp(fam.points, MAX_AXIS_POINTS))
        })
        .collect();
    let trap = |j: usize, m: usize| -> f64 { if j == 0 || j == m - 1 { 0.5 } else { 1.0 } };
    let total: usize = axes.iter().map(Vec::len).product();
    let mut thetas = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    for idx in 0..total {
        let m0 = axes[0].len();
        let (j0, j1) = (idx % m0, idx / m0);
        let (z, t) = if k == 1 {
            (vec![axes[0][j0]], trap(j0, m0))
        } else {
            let m1 = axes[1].len();
            (vec![axes[0][j0], axes[1][j1]], trap(j0, m0) * trap(j1, m1))
        };
        let theta = frame.theta(&z);
        if !in_box(fam, &theta) {
            continue;
        }
        weights.push((log_weight(fam, h, &theta) - peak).exp() * t);
        thetas.push(theta);
    }
    let z: f64 = weights.iter().sum();
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::NonNormalizable(format!("prior integral is {z}")));
    }
    weights.iter_mut().for_each(|w| *w /= z);
    Ok(PriorGrid { thetas, weights })
}

/// Predictive `p(x | nu, n)` by quadrature over the prior.
pub fn ppd(fam: &FiniteExpFamily, h: &ExpFamHyper) -> Result<Vec<f64>> {
    let grid = prior_grid(fam, h)?;
    let mut out = vec![0.0; fam.outcomes()];
    for (theta, w) in grid.thetas.iter().zip(&grid.weights) {
        for (o, p) in out.iter_mut().zip(fam.likelihood(theta)) {
            *o += w * p;
        }
    }
    Ok(out)
}

/// Largest `|E[phi | nu, n] - nu / n|` over the statistic's coordinates,
/// with the left side computed from the quadrature predictive.
pub fn credible_mean_check(fam: &FiniteExpFamily, h: &ExpFamHyper) -> Result<f64> {
    let p = ppd(fam, h)?;
    Ok(fam
        .mean_of(&p)
        .iter()
        .zip(h.mean())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Prior moments of the mean parameter: `r1 = E[mu(theta)]`,
/// `R2 = E[mu(theta) mu(theta)^T]`.
pub fn mean_parameter_moments(fam: &FiniteExpFamily, h: &ExpFamHyper) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let grid = prior_grid(fam, h)?;
    let k = fam.dim();
    let mut r1 = vec![0.0; k];
    let mut r2 = vec![vec![0.0; k]; k];
    for (theta, w) in grid.thetas.iter().zip(&grid.weights) {
        let mu = fam.grad_cumulant(theta);
        for i in 0..k {
            r1[i] += w * mu[i];
            for j in 0..k {
                r2[i][j] += w * mu[i] * mu[j];
            }
        }
    }
    Ok((r1, r2))
}

/// `R2 - r1 r1^T`, the variance of the mean parameter implied by a
/// first-moment report `r1` and a two-sample cross-moment report `R2`.
pub fn second_moment_variance(r1: &[f64], r2: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let k = r1.len();
    if r2.len() != k || r2.iter().any(|row| row.len() != k) {
        return Err(Error::InconsistentReport(format!("R2 must be {k} x {k}")));
    }
    for i in 0..k {
        for j in 0..i {
            if (r2[i][j] - r2[j][i]).abs() > PSD_TOL {
                return Err(Error::InconsistentReport(format!("R2 is not symmetric at ({i}, {j})")));
            }
        }
    }
    let v = DMatrix::from_fn(k, k, |i, j| r2[i][j] - r1[i] * r1[j]);
    let sym = (&v + v.transpose()) * 0.5;
    let min_eig = SymmetricEigen::new(sym).eigenvalues.min();
    if min_eig < -PSD_TOL {
        return Err(Error::InconsistentReport(format!(
            "R2 - r1 r1^T has eigenvalue {min_eig}; no distribution has these moments"
        )));
    }
    Ok((0..k).map(|i| (0..k).map(|j| v[(i, j)]).collect()).collect())
}

/// Truthful `(r1, R2)` for the first `K - 1` indicator statistics of a
/// Dirichlet(alpha) agent: `R2` is the exchangeable pair law restricted to
/// those labels.
pub fn dirichlet_moment_reports(alpha: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let k = alpha.len();
    let n: f64 = alpha.iter().sum();
    let joint = pair_distribution(alpha);
    let r1 = alpha[..k - 1].iter().map(|a| a / n).collect();
    let r2 = (0..k - 1).map(|i| (0..k - 1).map(|j| joint[i * k + j]).collect()).collect();
    (r1, r2)
}

fn trace(v: &[Vec<f64>]) -> f64 {
    (0..v.len()).map(|i| v[i][i]).sum()
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

/// Outcome of an injectivity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InjectivityFlag {
    /// Every pair of distinct `n` gives predictives farther apart than the tolerance.
    Injective,
    /// Every pair coincides within the tolerance.
    NonInjective,
    Inconclusive,
}

/// Variance of the mean parameter as `n` grows with `nu / n` held fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceSweep {
    pub label: String,
    pub mean: Vec<f64>,
    pub ns: Vec<f64>,
    pub traces: Vec<f64>,
    pub strictly_decreasing: bool,
}

/// Predictives along `(n mu, n)` for one family and mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceTable {
    pub family: String,
    pub outcomes: usize,
    pub dim: usize,
    pub full_dimensional: bool,
    pub mean: Vec<f64>,
    pub ns: Vec<f64>,
    pub ppds: Vec<Vec<f64>>,
    /// `distances[a][b]`: sup distance between the predictives at `ns[a]`, `ns[b]`.
    pub distances: Vec<Vec<f64>>,
    /// `KL(p(x | n mu, n) || p(x | theta_hat))` per `n`.
    pub kl_to_mode: Vec<f64>,
    pub min_distance: f64,
    pub max_distance: f64,
    pub flag: InjectivityFlag,
    pub variance: Option<VarianceSweep>,
}

/// Predictives at `(n mu, n)` for each `n`, their pairwise sup distances,
/// and their KL divergence to the likelihood at the prior mode.
pub fn injectivity_sweep(fam: &FiniteExpFamily, mu: &[f64], ns: &[f64]) -> Result<EvidenceTable> {
    let mode = fam.natural_mode(mu)?;
    let limit = fam.likelihood(&mode);
    let ppds = ns
        .par_iter()
        .map(|&n| ppd(fam, &ExpFamHyper::from_mean(mu, n)))
        .collect::<Result<Vec<_>>>()?;
    let m = ns.len();
    let mut distances = vec![vec![0.0; m]; m];
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for a in 0..m {
        for b in 0..m {
            let d = ppds[a]
                .iter()
                .zip(&ppds[b])
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            distances[a][b] = d;
            if a < b && ns[a] != ns[b] {
                lo = lo.min(d);
                hi = hi.max(d);
            }
        }
    }
    let kl_to_mode = ppds
        .iter()
        .map(|p| {
            p.iter()
                .zip(&limit)
                .filter(|(pi, _)| **pi > 0.0)
                .map(|(pi, qi)| pi * (pi / qi).ln())
                .sum()
        })
        .collect();
    let flag = if !lo.is_finite() {
        InjectivityFlag::Inconclusive
    } else if lo > SWEEP_TOL {
        InjectivityFlag::Injective
    } else if hi < SWEEP_TOL {
        InjectivityFlag::NonInjective
    } else {
        InjectivityFlag::Inconclusive
    };
    Ok(EvidenceTable {
        family: fam.name.clone(),
        outcomes: fam.outcomes(),
        dim: fam.dim(),
        full_dimensional: fam.full_dimensional(),
        mean: mu.to_vec(),
        ns: ns.to_vec(),
        ppds,
        distances,
        kl_to_mode,
        min_distance: if lo.is_finite() { lo } else { 0.0 },
        max_distance: hi,
        flag,
        variance: None,
    })
}

/// Trace of `Var[mu(theta) | n mu, n]` by quadrature for each `n`.
pub fn variance_trace_sweep(fam: &FiniteExpFamily, mu: &[f64], ns: &[f64]) -> Result<VarianceSweep> {
    let traces = ns
        .par_iter()
        .map(|&n| {
            let (r1, r2) = mean_parameter_moments(fam, &ExpFamHyper::from_mean(mu, n))?;
            Ok(trace(&second_moment_variance(&r1, &r2)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VarianceSweep {
        label: fam.name.clone(),
        mean: mu.to_vec(),
        ns: ns.to_vec(),
        strictly_decreasing: strictly_decreasing(&traces),
        traces,
    })
}

/// Trace of `R2 - r1 r1^T` from truthful Dirichlet reports at `alpha = n p`.
pub fn dirichlet_variance_sweep(p: &[f64], ns: &[f64]) -> Result<VarianceSweep> {
    let traces = ns
        .iter()
        .map(|&n| {
            let alpha: Vec<f64> = p.iter().map(|v| v * n).collect();
            let (r1, r2) = dirichlet_moment_reports(&alpha);
            Ok(trace(&second_moment_variance(&r1, &r2)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VarianceSweep {
        label: format!("dirichlet{}", p.len()),
        mean: p.to_vec(),
        ns: ns.to_vec(),
        strictly_decreasing: strictly_decreasing(&traces),
        traces,
    })
}

/// A family plus the mean at which it is swept.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceCase {
    pub family: FiniteExpFamily,
    pub mean: Vec<f64>,
}

/// Two full-dimensional and three lower-dimensional test families.
pub fn default_cases() -> Vec<EvidenceCase> {
    let case = |name: &str, phi: Vec<Vec<f64>>, bound: f64, mean: Vec<f64>| EvidenceCase {
        family: FiniteExpFamily::new(name, phi, bound).expect("minimal by construction"),
        mean,
    };
    vec![
        case("bernoulli", vec![vec![0.0], vec![1.0]], 150.0, vec![0.3]),
        case(
            "categorical3",
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            250.0,
            vec![0.2, 0.5],
        ),
        case("counts3", vec![vec![0.0], vec![1.0], vec![2.0]], 50.0, vec![0.8]),
        case("counts4", (0..4).map(|x| vec![x as f64]).collect(), 50.0, vec![1.2]),
        case(
            "quadratic4",
            (0..4).map(|x| vec![x as f64, (x * x) as f64]).collect(),
            200.0,
            vec![1.2, 2.6],
        ),
    ]
}

pub fn default_ns() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 8.0]
}

pub fn variance_ns() -> Vec<f64> {
    (2..=100).map(f64::from).collect()
}

/// `phi = (x, x^2)` on `{0, 1, 2, 3}` at the moments of the uniform law.
///
/// The reflection `x -> 3 - x` maps `phi` affinely onto itself and fixes
/// this mean, so every prior `(n mu, n)` is reflection invariant and its
/// predictive is symmetric. A symmetric law on four points with these two
/// moments is uniform, so all `n` give the same predictive even though
/// `dim phi < |X| - 1`.
pub fn symmetric_case() -> EvidenceCase {
    EvidenceCase {
        family: FiniteExpFamily::new(
            "quadratic4-symmetric",
            (0..4).map(|x| vec![x as f64, (x * x) as f64]).collect(),
            200.0,
        )
        .expect("minimal by construction"),
        mean: vec![1.5, 3.5],
    }
}

/// Every evidence table the lab produces by default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub tables: Vec<EvidenceTable>,
    pub dirichlet: VarianceSweep,
    /// [`symmetric_case`], kept apart from the default families.
    pub symmetric: EvidenceTable,
}

fn full_table(c: &EvidenceCase) -> Result<EvidenceTable> {
    let mut t = injectivity_sweep(&c.family, &c.mean, &default_ns())?;
    t.variance = Some(variance_trace_sweep(&c.family, &c.mean, &variance_ns())?);
    Ok(t)
}

/// Runs the injectivity and variance sweeps over [`default_cases`] and
/// [`symmetric_case`], plus the Dirichlet variance sweep at
/// `p = (0.2, 0.3, 0.5)`.
pub fn run_default_sweeps() -> Result<ConjectureReport> {
    let tables = default_cases().iter().map(full_table).collect::<Result<Vec<_>>>()?;
    Ok(ConjectureReport {
        tables,
        dirichlet: dirichlet_variance_sweep(&[0.2, 0.3, 0.5], &variance_ns())?,
        symmetric: full_table(&symmetric_case())?,
    })
}
