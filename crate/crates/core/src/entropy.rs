//! Entropy generation: the macroscopic balance of an open system and the
//! statistical path form `ΔS = -k_B Σ p ln p`, with its gradient, inverse
//! and first variation.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ensemble::{PathDistribution, NORMALIZATION_TOL};
use crate::error::{Error, Result};

/// Boltzmann constant in J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Macroscopic terms of an open-system entropy balance.
///
/// JSON field names: `q_r` (J), `t_r` (K), `t_a` (K), `dh` (J), `ds_ex`
/// (J/K), `de_k` (J), `de_g` (J), `w` (J). Missing energy terms default to 0.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ThermoAccount {
    /// Heat received from the source reservoir.
    #[serde(default)]
    pub q_r: f64,
    /// Source temperature.
    pub t_r: f64,
    /// Ambient (reference) temperature.
    pub t_a: f64,
    /// Enthalpy change.
    #[serde(default)]
    pub dh: f64,
    /// Net exchanged entropy, entering minus leaving.
    #[serde(default)]
    pub ds_ex: f64,
    #[serde(default)]
    pub de_k: f64,
    #[serde(default)]
    pub de_g: f64,
    /// Work done by the system.
    #[serde(default)]
    pub w: f64,
}

impl ThermoAccount {
    /// Account with only temperatures set.
    pub fn at_temperatures(t_r: f64, t_a: f64) -> Self {
        Self { t_r, t_a, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for t in [self.t_r, self.t_a] {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::NonPositiveTemperature(t));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyForm {
    Macroscopic,
    Statistical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub value: f64,
    pub form: EntropyForm,
    /// SHA-256 of the JSON-encoded inputs.
    pub inputs_hash: String,
}

impl EntropyReport {
    pub fn macroscopic(acct: &ThermoAccount) -> Result<Self> {
        Ok(Self {
            value: entropy_generation_macroscopic(acct)?,
            form: EntropyForm::Macroscopic,
            inputs_hash: hash_json(acct),
        })
    }

    pub fn statistical(dist: &PathDistribution, kb: f64) -> Result<Self> {
        Ok(Self {
            value: entropy_generation_statistical(dist, kb)?,
            form: EntropyForm::Statistical,
            inputs_hash: hash_json(&(dist, kb)),
        })
    }
}

pub(crate) fn hash_json<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable");
    hex::encode(Sha256::digest(&bytes))
}

fn check_kb(kb: f64) -> Result<()> {
    if kb.is_finite() && kb > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidBoltzmann(kb))
    }
}

/// `(Q_r/T_a)(1 - T_a/T_r) + ΔH/T_a - Δ_ex S + (ΔE_k + ΔE_g - W)/T_a`.
pub fn entropy_generation_macroscopic(acct: &ThermoAccount) -> Result<f64> {
    acct.validate()?;
    let ThermoAccount { q_r, t_r, t_a, dh, ds_ex, de_k, de_g, w } = *acct;
    Ok(q_r / t_a * (1.0 - t_a / t_r) + dh / t_a - ds_ex + (de_k + de_g - w) / t_a)
}

/// `-k_B Σ p_k ln p_k`.
pub fn entropy_generation_statistical(dist: &PathDistribution, kb: f64) -> Result<f64> {
    check_kb(kb)?;
    let h: f64 = dist.probabilities().iter().map(|&p| -p * p.ln()).sum();
    // rounding can leave -0.0 or a tiny negative for a point mass
    Ok(kb * h.max(0.0))
}

/// `∂ΔS/∂p = -k_B (1 + ln p)` for a single probability.
pub fn gradient_at(p: f64, kb: f64) -> Result<f64> {
    check_kb(kb)?;
    if !(p > 0.0) {
        return Err(Error::NonPositiveProbability(p));
    }
    Ok(-kb * (1.0 + p.ln()))
}

/// Entropy gradient with respect to path `k`.
pub fn entropy_gradient(dist: &PathDistribution, kb: f64, k: usize) -> Result<f64> {
    gradient_at(dist.probability(k)?, kb)
}

/// Inverse of [`gradient_at`]: `p = exp(-g/k_B - 1)`.
pub fn probability_from_gradient(g: f64, kb: f64) -> Result<f64> {
    check_kb(kb)?;
    let p = (-g / kb - 1.0).exp();
    if p.is_finite() {
        Ok(p)
    } else {
        Err(Error::Overflow(g))
    }
}

/// First variation `-k_B Σ (1 + ln p_k) dp_k` for a probability-conserving
/// perturbation (`Σ dp_k = 0`).
pub fn entropy_variation(dist: &PathDistribution, dp: &[f64], kb: f64) -> Result<f64> {
    check_kb(kb)?;
    if dp.len() != dist.len() {
        return Err(Error::DimensionMismatch { expected: dist.len(), got: dp.len() });
    }
    let drift: f64 = dp.iter().sum();
    if !(drift.abs() <= NORMALIZATION_TOL) {
        return Err(Error::UnnormalizedPerturbation(drift));
    }
    Ok(-kb * dist.probabilities().iter().zip(dp).map(|(p, d)| (1.0 + p.ln()) * d).sum::<f64>())
}
