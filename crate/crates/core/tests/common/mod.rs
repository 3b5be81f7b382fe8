#![allow(dead_code)]

use elicit_core::families::{Family, Hyper};
use rand::Rng;
use statrs::function::gamma::ln_gamma;

/// Composite Simpson rule on `m` (rounded up to even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let m = m + m % 2;
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

pub fn normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    (-(x - mean).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

pub fn gamma_log_pdf(x: f64, shape: f64, rate: f64) -> f64 {
    shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - ln_gamma(shape)
}

pub fn poisson_log_pmf(c: u64, lambda: f64) -> f64 {
    c as f64 * lambda.ln() - lambda - ln_gamma(c as f64 + 1.0)
}

/// Hyper reachable from a simple prior after a random number of samples.
pub fn random_hyper<R: Rng>(family: Family, rng: &mut R) -> Hyper {
    match family.canonical() {
        Family::NormalKnownVar { .. } => {
            let n = 1.0 + rng.random_range(0..40) as f64;
            Hyper::scalar(rng.random_range(-3.0..3.0) * n, n)
        }
        Family::PoissonGamma => {
            let n = 1.0 + rng.random_range(0..40) as f64;
            Hyper::scalar(1.0 + rng.random_range(0..120) as f64, n)
        }
        Family::UniformPareto => {
            let n = 3.0 + rng.random_range(0..40) as f64;
            Hyper::scalar(rng.random_range(0.2..5.0), n)
        }
        Family::CategoricalDirichlet { k } => {
            let alpha: Vec<f64> = (0..k).map(|_| 1.0 + rng.random_range(0..15) as f64).collect();
            let n = alpha.iter().sum();
            Hyper::new(alpha, n)
        }
        Family::BernoulliBeta => unreachable!("canonical form"),
    }
}
