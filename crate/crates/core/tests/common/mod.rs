//! Seeded generators shared by the integration and acceptance tests.
#![allow(dead_code)]

use pathorder::ensemble::PathDistribution;
use pathorder::stochorder::DiscreteRV;
use rand::Rng;

/// Weights drawn from `[lo, 1)` and normalized.
pub fn random_distribution<R: Rng>(rng: &mut R, n: usize, lo: f64) -> PathDistribution {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(lo..1.0)).collect();
    PathDistribution::from_weights(&w).unwrap()
}

pub fn random_actions<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-5.0..5.0)).collect()
}

pub fn mean(p: &[f64], a: &[f64]) -> f64 {
    p.iter().zip(a).map(|(p, a)| p * a).sum()
}

pub fn shannon(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|x| x * x.ln()).sum::<f64>()
}

/// A random distribution on `actions` whose mean is exactly `target`
/// (up to rounding): a random `q` mixed with a point mass at the extreme
/// action on the far side of `target`.
pub fn feasible_with_mean<R: Rng>(rng: &mut R, actions: &[f64], target: f64) -> Vec<f64> {
    let n = actions.len();
    let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>().powi(3)).collect();
    let total: f64 = w.iter().sum();
    let q: Vec<f64> = w.iter().map(|x| x / total).collect();
    let m = mean(&q, actions);
    let pick = |better: fn(f64, f64) -> bool| {
        (0..n).fold(0, |best, k| if better(actions[k], actions[best]) { k } else { best })
    };
    let (k, edge) = if m > target {
        let k = pick(|a, b| a < b);
        (k, actions[k])
    } else {
        let k = pick(|a, b| a > b);
        (k, actions[k])
    };
    if (m - edge).abs() < 1e-300 {
        return q;
    }
    // (1 - t) m + t edge = target
    let t = (m - target) / (m - edge);
    let mut p: Vec<f64> = q.iter().map(|x| (1.0 - t) * x).collect();
    p[k] += t;
    p
}

/// Random variable on integers `0..span` with `n` atoms.
pub fn random_rv<R: Rng>(rng: &mut R, n: usize, span: i32) -> DiscreteRV {
    let atoms = (0..n).map(|_| (rng.random_range(0..span) as f64, rng.random_range(0.05..1.0))).collect();
    DiscreteRV::from_atoms(atoms).unwrap()
}

/// `(X, Y)` with `X <=st Y`: `Y` moves every atom of `X` up by a
/// nonnegative integer.
pub fn ordered_pair<R: Rng>(rng: &mut R, n: usize, span: i32) -> (DiscreteRV, DiscreteRV) {
    let x = random_rv(rng, n, span);
    let atoms = x.support().iter().zip(x.probs()).map(|(&s, &p)| (s + rng.random_range(0..3) as f64, p)).collect();
    (x, DiscreteRV::from_atoms(atoms).unwrap())
}
