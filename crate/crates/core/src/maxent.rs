//! Maximum path entropy under a mean-action constraint.
//!
//! Maximizing `-Σ p ln p` subject to `Σ p = 1` and `Σ p A = ⟨A⟩` gives the
//! exponential family `p_k = exp(-η A_k) / Q`. The multiplier `η` is found by
//! bisection: the constrained mean `⟨A⟩_η` is strictly decreasing in `η`
//! whenever the actions are not all equal, so a sign change bracketed once
//! is always found.

use serde::{Deserialize, Serialize};

use crate::ensemble::PathDistribution;
use crate::entropy::{entropy_gradient, gradient_at};
use crate::error::{Error, Result};

/// Largest |η| tried while expanding the bracket.
const MAX_BRACKET: f64 = 1e300;
const MAX_BISECTIONS: usize = 4000;
/// Achieved-mean tolerance relative to the action scale.
const MEAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxEntSolution {
    /// Lagrange multiplier conjugate to the action.
    pub eta: f64,
    /// Normalizing sum `Σ exp(-η A_k)`; may overflow to infinity for large
    /// `|η A|`, in which case `log_partition_sum` is still exact.
    pub partition_sum: f64,
    pub log_partition_sum: f64,
    pub probabilities: Vec<f64>,
    pub mean_action: f64,
    pub target_mean: f64,
    /// `Σ exp(-∂ΔS/∂p_k / k_B)` over the returned distribution; equals `e`.
    pub identity_sum: f64,
    pub iterations: usize,
    #[serde(skip)]
    log_probabilities: Vec<f64>,
}

impl MaxEntSolution {
    /// Offset `c` such that the shifted actions `A_k + c` have normalizing
    /// sum exactly `e` at the same `η` (and the same distribution). `None`
    /// when `η = 0`.
    pub fn unit_gauge_shift(&self) -> Option<f64> {
        (self.eta != 0.0).then(|| (self.log_partition_sum - 1.0) / self.eta)
    }

    pub fn log_probabilities(&self) -> &[f64] {
        &self.log_probabilities
    }

    /// Fails if a probability underflowed to zero.
    pub fn to_distribution(&self, actions: &[f64]) -> Result<PathDistribution> {
        let labels = (0..self.probabilities.len()).map(|i| i.to_string()).collect();
        PathDistribution::new(self.probabilities.clone(), actions.to_vec(), labels)
    }

    /// Indices of the most probable paths.
    pub fn argmax(&self) -> Vec<usize> {
        let best = self.log_probabilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (0..self.log_probabilities.len()).filter(|&k| self.log_probabilities[k] == best).collect()
    }
}

/// Log-partition sum and log-probabilities at `eta`, computed with a max
/// shift so that neither overflows.
pub fn exponential_family(actions: &[f64], eta: f64) -> (f64, Vec<f64>) {
    let exponents: Vec<f64> = actions.iter().map(|a| -eta * a).collect();
    let shift = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_q = shift + exponents.iter().map(|x| (x - shift).exp()).sum::<f64>().ln();
    (log_q, exponents.iter().map(|x| x - log_q).collect())
}

/// `⟨A⟩_η = Σ A_k exp(-η A_k) / Σ exp(-η A_k)`.
pub fn mean_action_at(actions: &[f64], eta: f64) -> f64 {
    let (_, logp) = exponential_family(actions, eta);
    actions.iter().zip(&logp).map(|(a, lp)| a * lp.exp()).sum()
}

pub fn solve_maxent(actions: &[f64], target_mean: f64) -> Result<MaxEntSolution> {
    if actions.is_empty() {
        return Err(Error::InvalidArgument("at least one action is required".into()));
    }
    if let Some(a) = actions.iter().find(|a| !a.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite action {a}")));
    }
    if !target_mean.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite target mean {target_mean}")));
    }
    let min = actions.iter().copied().fold(f64::INFINITY, f64::min);
    let max = actions.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        // any η gives the uniform distribution; report η = 0
        if target_mean != min {
            return Err(Error::DegenerateActions { action: min, target: target_mean });
        }
        return Ok(solution(actions, 0.0, target_mean, 0));
    }
    if target_mean < min || target_mean > max {
        return Err(Error::TargetOutOfRange { target: target_mean, min, max });
    }

    let tol = MEAN_TOL * min.abs().max(max.abs()).max(1.0);
    let excess = |eta: f64| mean_action_at(actions, eta) - target_mean;
    let mut iterations = 0;

    // bracket: excess(lo) >= 0 >= excess(hi)
    let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
    while excess(lo) < 0.0 {
        iterations += 1;
        hi = lo;
        lo *= 2.0;
        if lo.abs() > MAX_BRACKET {
            return near_bound(actions, lo, target_mean, tol, iterations);
        }
    }
    while excess(hi) > 0.0 {
        iterations += 1;
        lo = hi;
        hi *= 2.0;
        if hi > MAX_BRACKET {
            return near_bound(actions, hi, target_mean, tol, iterations);
        }
    }

    let mut best = if excess(lo).abs() <= excess(hi).abs() { lo } else { hi };
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let e = excess(mid);
        if e.abs() < excess(best).abs() {
            best = mid;
        }
        if e == 0.0 {
            break;
        }
        if e > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if excess(best).abs() > tol {
        return Err(Error::RootSearch(format!(
            "mean {} misses target {target_mean} after {iterations} steps",
            mean_action_at(actions, best)
        )));
    }
    Ok(solution(actions, best, target_mean, iterations))
}

fn near_bound(actions: &[f64], eta: f64, target: f64, tol: f64, iterations: usize) -> Result<MaxEntSolution> {
    if (mean_action_at(actions, eta) - target).abs() <= tol {
        Ok(solution(actions, eta, target, iterations))
    } else {
        Err(Error::RootSearch(format!("bracket for η exceeded {MAX_BRACKET:e}")))
    }
}

fn solution(actions: &[f64], eta: f64, target_mean: f64, iterations: usize) -> MaxEntSolution {
    let (log_q, logp) = exponential_family(actions, eta);
    let probabilities: Vec<f64> = logp.iter().map(|lp| lp.exp()).collect();
    let mean_action = actions.iter().zip(&probabilities).map(|(a, p)| a * p).sum();
    let identity_sum = logp.iter().map(|lp| (1.0 + lp).exp()).sum();
    MaxEntSolution {
        eta,
        partition_sum: log_q.exp(),
        log_partition_sum: log_q,
        probabilities,
        mean_action,
        target_mean,
        identity_sum,
        iterations,
        log_probabilities: logp,
    }
}

/// `η = (∂ΔS/∂p_k) / (k_B A_k) = -(1 + ln p_k) / A_k`.
pub fn eta_from_gradient(action_k: f64, dist: &PathDistribution, k: usize, kb: f64) -> Result<f64> {
    if action_k == 0.0 {
        return Err(Error::ZeroAction);
    }
    Ok(entropy_gradient(dist, kb, k)? / (kb * action_k))
}

/// Same as [`eta_from_gradient`] for a bare probability, which need not
/// belong to a normalized distribution.
pub fn eta_at(action: f64, p: f64, kb: f64) -> Result<f64> {
    if action == 0.0 {
        return Err(Error::ZeroAction);
    }
    Ok(gradient_at(p, kb)? / (kb * action))
}

/// `Σ_k exp(-(1/k_B) ∂ΔS/∂p_k)`, which is `e · Σ p_k = e` for every valid
/// distribution.
pub fn partition_identity_check(dist: &PathDistribution, kb: f64) -> Result<f64> {
    (0..dist.len()).map(|k| Ok((-entropy_gradient(dist, kb, k)? / kb).exp())).sum()
}
