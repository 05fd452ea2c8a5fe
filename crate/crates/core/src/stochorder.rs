//! Two different orders, under separate names:
//!
//! * the *path order*, a total preorder on the paths of one distribution by
//!   their probability, with its equivalent form in terms of entropy
//!   gradients;
//! * the *usual stochastic order* `X ≤st Y` between random variables,
//!   decided through CDFs and witnessed by the quantile coupling, together
//!   with the convolution and mixture operations it is closed under.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::ensemble::{PathDistribution, NORMALIZATION_TOL};
use crate::entropy::gradient_at;
use crate::error::{Error, Result};

/// Slack when comparing CDF values that are sums of rounded products.
pub const CDF_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathRelation {
    Less,
    Greater,
    Equal,
}

impl From<Ordering> for PathRelation {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => PathRelation::Less,
            Ordering::Greater => PathRelation::Greater,
            Ordering::Equal => PathRelation::Equal,
        }
    }
}

/// Relation of path `i` to path `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathOrderResult {
    pub i: usize,
    pub j: usize,
    pub relation: PathRelation,
    pub p_i: f64,
    pub p_j: f64,
    pub g_i: f64,
    pub g_j: f64,
}

fn order_inputs(dist: &PathDistribution, i: usize, j: usize, kb: f64) -> Result<(f64, f64, f64, f64)> {
    let (p_i, p_j) = (dist.probability(i)?, dist.probability(j)?);
    Ok((p_i, p_j, gradient_at(p_i, kb)?, gradient_at(p_j, kb)?))
}

/// Orders paths by probability: `i < j` iff `p_i < p_j`. Gradients are
/// attached in natural units (`k_B = 1`).
pub fn compare_paths(dist: &PathDistribution, i: usize, j: usize) -> Result<PathOrderResult> {
    let (p_i, p_j, g_i, g_j) = order_inputs(dist, i, j, 1.0)?;
    let relation = p_i.partial_cmp(&p_j).expect("finite").into();
    Ok(PathOrderResult { i, j, relation, p_i, p_j, g_i, g_j })
}

/// Orders paths by entropy gradient. The gradient `-k_B (1 + ln p)` is
/// strictly decreasing in `p`, so the smaller path is the one with the
/// *larger* gradient.
pub fn gradient_order(dist: &PathDistribution, i: usize, j: usize, kb: f64) -> Result<PathOrderResult> {
    let (p_i, p_j, g_i, g_j) = order_inputs(dist, i, j, kb)?;
    let relation = g_j.partial_cmp(&g_i).expect("finite").into();
    Ok(PathOrderResult { i, j, relation, p_i, p_j, g_i, g_j })
}

/// All indices of maximal probability.
pub fn greatest_path(dist: &PathDistribution) -> Vec<usize> {
    let p = dist.probabilities();
    let best = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..p.len()).filter(|&k| p[k] == best).collect()
}

/// Finite-support random variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRv")]
pub struct DiscreteRV {
    support: Vec<f64>,
    probs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawRv {
    support: Vec<f64>,
    probs: Vec<f64>,
}

impl TryFrom<RawRv> for DiscreteRV {
    type Error = Error;

    fn try_from(raw: RawRv) -> Result<Self> {
        DiscreteRV::new(raw.support, raw.probs)
    }
}

impl DiscreteRV {
    pub fn new(support: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != probs.len() {
            return Err(Error::InvalidRandomVariable(format!(
                "{} support points, {} probabilities",
                support.len(),
                probs.len()
            )));
        }
        if support.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidRandomVariable("non-finite support point".into()));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidRandomVariable("support must be strictly increasing".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return Err(Error::InvalidRandomVariable(format!("probability {p} outside (0, 1]")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidRandomVariable(format!("probabilities sum to {sum}")));
        }
        Ok(Self { support, probs })
    }

    pub fn point_mass(x: f64) -> Result<Self> {
        Self::new(vec![x], vec![1.0])
    }

    /// `P(X = 1) = p`; degenerates to a point mass at 0 or 1.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidRandomVariable(format!("Bernoulli parameter {p}")));
        }
        match p {
            0.0 => Self::point_mass(0.0),
            1.0 => Self::point_mass(1.0),
            _ => Self::new(vec![0.0, 1.0], vec![1.0 - p, p]),
        }
    }

    /// Builds a variable from unsorted `(value, mass)` pairs: equal values
    /// are merged, zero masses dropped and the total renormalized.
    pub fn from_atoms(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.iter().any(|(x, m)| !x.is_finite() || !(*m >= 0.0) || !m.is_finite()) {
            return Err(Error::InvalidRandomVariable("atoms need finite values and masses >= 0".into()));
        }
        atoms.retain(|&(_, m)| m > 0.0);
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut support: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut probs: Vec<f64> = Vec::with_capacity(atoms.len());
        for (x, m) in atoms {
            if support.last() == Some(&x) {
                *probs.last_mut().expect("nonempty") += m;
            } else {
                support.push(x);
                probs.push(m);
            }
        }
        let total: f64 = probs.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidRandomVariable("no positive mass".into()));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Self::new(support, probs)
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.support.iter().zip(&self.probs).map(|(x, p)| x * p).sum()
    }

    /// `P(X <= t)`.
    pub fn cdf(&self, t: f64) -> f64 {
        let n = self.support.partition_point(|&x| x <= t);
        if n == self.len() {
            1.0
        } else {
            self.probs[..n].iter().sum()
        }
    }

    /// Cumulative levels `F(x_1), .., F(x_n)` with the last forced to 1.
    fn levels(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out: Vec<f64> = self
            .probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        *out.last_mut().expect("nonempty") = 1.0;
        out
    }

    /// Smallest support point `x` with `F(x) >= u`, for `u` in `(0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let levels = self.levels();
        let i = levels.partition_point(|&f| f < u);
        self.support[i.min(self.len() - 1)]
    }
}

/// Verdict of the usual stochastic order between `X` and `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UsualOrder {
    /// `X ≤st Y` and not equal in law.
    LessEq,
    /// `Y ≤st X` and not equal in law.
    GreaterEq,
    Equal,
    Incomparable,
}

/// `(t, F_X(t), F_Y(t))` at every point of the merged support.
pub fn cdf_table(x: &DiscreteRV, y: &DiscreteRV) -> Vec<(f64, f64, f64)> {
    let mut points: Vec<f64> = x.support.iter().chain(&y.support).copied().collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    points.into_iter().map(|t| (t, x.cdf(t), y.cdf(t))).collect()
}

/// Decides the order from CDFs: `X ≤st Y` iff `F_X(t) >= F_Y(t)` for all `t`.
/// Checking the merged support suffices since both CDFs are step functions
/// jumping only there.
pub fn usual_order(x: &DiscreteRV, y: &DiscreteRV) -> UsualOrder {
    let table = cdf_table(x, y);
    let x_below = table.iter().all(|&(_, fx, fy)| fx >= fy - CDF_TOL);
    let y_below = table.iter().all(|&(_, fx, fy)| fy >= fx - CDF_TOL);
    match (x_below, y_below) {
        (true, true) => UsualOrder::Equal,
        (true, false) => UsualOrder::LessEq,
        (false, true) => UsualOrder::GreaterEq,
        (false, false) => UsualOrder::Incomparable,
    }
}

/// Quantile coupling of `X` and `Y` on a common uniform variable `Z`.
///
/// `Z` is discretized into the intervals `(levels[m-1], levels[m]]` of the
/// merged cumulative levels of both variables; `z_probs[m]` is the width of
/// interval `m` and `psi1[m]`, `psi2[m]` the values of `X` and `Y` on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub levels: Vec<f64>,
    pub z_probs: Vec<f64>,
    pub psi1: Vec<f64>,
    pub psi2: Vec<f64>,
}

impl Coupling {
    /// Laws of `psi1(Z)` and `psi2(Z)`.
    pub fn marginals(&self) -> Result<(DiscreteRV, DiscreteRV)> {
        let law = |psi: &[f64]| DiscreteRV::from_atoms(psi.iter().copied().zip(self.z_probs.iter().copied()).collect());
        Ok((law(&self.psi1)?, law(&self.psi2)?))
    }

    pub fn is_monotone(&self) -> bool {
        self.psi1.iter().zip(&self.psi2).all(|(a, b)| a <= b)
    }
}

/// Builds the quantile coupling and checks `psi1 <= psi2` on every atom of
/// `Z`. On failure the error carries a point `t` with `F_X(t) < F_Y(t)`.
pub fn build_coupling(x: &DiscreteRV, y: &DiscreteRV) -> Result<Coupling> {
    let mut cuts: Vec<f64> = x.levels().into_iter().chain(y.levels()).collect();
    cuts.sort_by(f64::total_cmp);
    let mut levels: Vec<f64> = Vec::with_capacity(cuts.len());
    for u in cuts {
        let prev = levels.last().copied().unwrap_or(0.0);
        if u > prev + CDF_TOL {
            levels.push(u);
        }
    }
    // the final level is exactly 1 in both lists
    *levels.last_mut().expect("nonempty") = 1.0;

    let mut z_probs = Vec::with_capacity(levels.len());
    let mut psi1 = Vec::with_capacity(levels.len());
    let mut psi2 = Vec::with_capacity(levels.len());
    let mut prev = 0.0;
    for &u in &levels {
        let mid = 0.5 * (prev + u);
        z_probs.push(u - prev);
        psi1.push(x.quantile(mid));
        psi2.push(y.quantile(mid));
        prev = u;
    }
    if let Some(m) = (0..levels.len()).find(|&m| psi1[m] > psi2[m]) {
        let t = psi2[m];
        return Err(Error::NotOrdered { witness: t, cdf_x: x.cdf(t), cdf_y: y.cdf(t) });
    }
    let coupling = Coupling { levels, z_probs, psi1, psi2 };
    let (mx, my) = coupling.marginals()?;
    if !same_law(&mx, x) || !same_law(&my, y) {
        return Err(Error::InvalidRandomVariable("coupling does not reproduce its marginals".into()));
    }
    Ok(coupling)
}

fn same_law(a: &DiscreteRV, b: &DiscreteRV) -> bool {
    a.support == b.support && a.probs.iter().zip(&b.probs).all(|(p, q)| (p - q).abs() <= CDF_TOL)
}

/// Law of `X + Y` for independent `X`, `Y`.
pub fn convolve(x: &DiscreteRV, y: &DiscreteRV) -> Result<DiscreteRV> {
    let atoms = x
        .support
        .iter()
        .zip(&x.probs)
        .flat_map(|(a, p)| y.support.iter().zip(&y.probs).map(move |(b, q)| (a + b, p * q)))
        .collect();
    DiscreteRV::from_atoms(atoms)
}

/// `Σ_c w_c · law(X_c)`.
pub fn mixture(components: &[DiscreteRV], weights: &[f64]) -> Result<DiscreteRV> {
    if components.is_empty() || components.len() != weights.len() {
        return Err(Error::InvalidWeights(format!("{} components, {} weights", components.len(), weights.len())));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::InvalidWeights(format!("weight {w} is negative or non-finite")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidWeights(format!("weights sum to {total}")));
    }
    let atoms = components
        .iter()
        .zip(weights)
        .flat_map(|(c, &w)| c.support.iter().zip(&c.probs).map(move |(x, p)| (*x, w * p)))
        .collect();
    DiscreteRV::from_atoms(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(p: &[f64]) -> PathDistribution {
        PathDistribution::from_probabilities(p.to_vec()).unwrap()
    }

    fn rv(s: &[f64], p: &[f64]) -> DiscreteRV {
        DiscreteRV::new(s.to_vec(), p.to_vec()).unwrap()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare_paths(&dist(&[0.2, 0.8]), 0, 1).unwrap().relation, PathRelation::Less);
        assert_eq!(compare_paths(&dist(&[0.5, 0.5]), 0, 1).unwrap().relation, PathRelation::Equal);
        let r = compare_paths(&dist(&[0.5, 0.3, 0.2]), 0, 2).unwrap();
        assert_eq!(r.relation, PathRelation::Greater);
        assert!((r.g_i - (-0.3068528194400547)).abs() < 1e-12);
        assert!((r.g_j - 0.6094379124341003).abs() < 1e-12);
        assert!(matches!(compare_paths(&dist(&[1.0]), 0, 1), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn gradient_order_examples() {
        assert_eq!(gradient_order(&dist(&[0.5, 0.5]), 0, 1, 1.0).unwrap().relation, PathRelation::Equal);
        let r = gradient_order(&dist(&[0.2, 0.8]), 0, 1, 1.0).unwrap();
        assert!((r.g_i - 0.6094379124341003).abs() < 1e-12);
        assert!((r.g_j - (-0.7768564486857903)).abs() < 1e-12);
        assert!(r.g_i > r.g_j);
        assert_eq!(r.relation, PathRelation::Less);
    }

    #[test]
    fn greatest_examples() {
        assert_eq!(greatest_path(&dist(&[1.0])), vec![0]);
        assert_eq!(greatest_path(&dist(&[0.25, 0.5, 0.25])), vec![1]);
        assert_eq!(greatest_path(&dist(&[0.4, 0.2, 0.4])), vec![0, 2]);
    }

    #[test]
    fn rv_validation() {
        assert!(DiscreteRV::new(vec![1.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(DiscreteRV::new(vec![0.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(DiscreteRV::new(vec![0.0, 1.0], vec![0.5, 0.6]).is_err());
        assert!(DiscreteRV::new(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
        assert!(DiscreteRV::new(vec![], vec![]).is_err());
        let x = DiscreteRV::from_atoms(vec![(2.0, 1.0), (0.0, 2.0), (2.0, 1.0), (5.0, 0.0)]).unwrap();
        assert_eq!(x.support(), &[0.0, 2.0]);
        assert_eq!(x.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn cdf_and_quantile() {
        let x = rv(&[0.0, 3.0], &[0.5, 0.5]);
        assert_eq!(x.cdf(-1.0), 0.0);
        assert_eq!(x.cdf(0.0), 0.5);
        assert_eq!(x.cdf(2.9), 0.5);
        assert_eq!(x.cdf(3.0), 1.0);
        assert_eq!(x.quantile(0.25), 0.0);
        assert_eq!(x.quantile(0.5), 0.0);
        assert_eq!(x.quantile(0.75), 3.0);
    }

    #[test]
    fn usual_order_examples() {
        let b3 = DiscreteRV::bernoulli(0.3).unwrap();
        let b6 = DiscreteRV::bernoulli(0.6).unwrap();
        assert_eq!(usual_order(&b3, &b3), UsualOrder::Equal);
        assert_eq!(usual_order(&b3, &b6), UsualOrder::LessEq);
        assert_eq!(usual_order(&b6, &b3), UsualOrder::GreaterEq);
        let spread = rv(&[0.0, 3.0], &[0.5, 0.5]);
        let one = DiscreteRV::point_mass(1.0).unwrap();
        assert_eq!(usual_order(&spread, &one), UsualOrder::Incomparable);
    }

    #[test]
    fn coupling_of_bernoullis() {
        let b3 = DiscreteRV::bernoulli(0.3).unwrap();
        let b6 = DiscreteRV::bernoulli(0.6).unwrap();
        let c = build_coupling(&b3, &b6).unwrap();
        let expected_z = [0.4, 0.3, 0.3];
        assert_eq!(c.z_probs.len(), 3);
        for (z, e) in c.z_probs.iter().zip(expected_z) {
            assert!((z - e).abs() < 1e-15);
        }
        assert_eq!(c.psi1, vec![0.0, 0.0, 1.0]);
        assert_eq!(c.psi2, vec![0.0, 1.0, 1.0]);
        assert!(c.is_monotone());
        let (mx, my) = c.marginals().unwrap();
        assert!(same_law(&mx, &b3) && same_law(&my, &b6));
    }

    #[test]
    fn coupling_of_equal_laws_is_diagonal() {
        let x = rv(&[-1.0, 0.5, 2.0], &[0.2, 0.5, 0.3]);
        let c = build_coupling(&x, &x).unwrap();
        assert_eq!(c.psi1, c.psi2);
    }

    #[test]
    fn coupling_failure_has_witness() {
        let spread = rv(&[0.0, 3.0], &[0.5, 0.5]);
        let one = DiscreteRV::point_mass(1.0).unwrap();
        match build_coupling(&spread, &one) {
            Err(Error::NotOrdered { witness, cdf_x, cdf_y }) => {
                assert_eq!(witness, 1.0);
                assert!(cdf_x < cdf_y);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn convolution_examples() {
        let x = rv(&[-1.0, 0.5, 2.0], &[0.2, 0.5, 0.3]);
        assert_eq!(convolve(&x, &DiscreteRV::point_mass(0.0).unwrap()).unwrap(), x);
        let half = DiscreteRV::bernoulli(0.5).unwrap();
        let s = convolve(&half, &half).unwrap();
        assert_eq!(s.support(), &[0.0, 1.0, 2.0]);
        assert_eq!(s.probs(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn mixture_examples() {
        let x = rv(&[-1.0, 0.5], &[0.2, 0.8]);
        assert_eq!(mixture(std::slice::from_ref(&x), &[1.0]).unwrap(), x);
        let zero = DiscreteRV::point_mass(0.0).unwrap();
        let one = DiscreteRV::point_mass(1.0).unwrap();
        assert_eq!(mixture(&[zero.clone(), one.clone()], &[0.5, 0.5]).unwrap(), DiscreteRV::bernoulli(0.5).unwrap());
        assert!(mixture(&[zero.clone(), one.clone()], &[0.5, 0.6]).is_err());
        assert!(mixture(&[zero.clone(), one], &[1.5, -0.5]).is_err());
        assert!(mixture(&[zero], &[]).is_err());
    }
}
