//! Test dynamical systems, phase-space partitions and ergodic diagnostics.
//!
//! Three area-preserving maps of the unit torus are shipped:
//!
//! * the Arnold cat map `(q, p) -> (2q + p, q + p) mod 1`, hyperbolic and
//!   ergodic with respect to Lebesgue measure;
//! * the doubling map `x -> 2x mod 1`, carried as a 2-D state with an inert
//!   momentum coordinate;
//! * the Chirikov standard map with kick strength `K`, integrable at `K = 0`
//!   and strongly chaotic for `K` of order 5 and above.
//!
//! States are stored as `(q_1, .., q_d, p_1, .., p_d)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Odd modulus of the lattice the doubling map acts on.
///
/// Plain binary floating point loses one mantissa bit per doubling and
/// collapses every orbit onto 0 within ~53 steps. On the lattice
/// `{a / M : 0 <= a < M}` the map `a -> 2a mod M` is a permutation, and since
/// `M` is prime with 2 as a primitive root every nonzero orbit has period
/// `M - 1 ≈ 1.1e15`.
pub const DOUBLING_MODULUS: u64 = 1_125_899_906_842_589;

/// A point in a `2d`-dimensional phase space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PhaseState(Vec<f64>);

impl PhaseState {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(Error::InvalidState(format!("dimension must be even and positive, got {}", coords.len())));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidState(format!("non-finite coordinate {bad}")));
        }
        Ok(Self(coords))
    }

    /// Convenience constructor for one degree of freedom.
    pub fn qp(q: f64, p: f64) -> Result<Self> {
        Self::new(vec![q, p])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Number of degrees of freedom `d`.
    pub fn dof(&self) -> usize {
        self.0.len() / 2
    }

    pub fn position(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn momentum(&self, i: usize) -> f64 {
        self.0[self.dof() + i]
    }
}

impl TryFrom<Vec<f64>> for PhaseState {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PhaseState> for Vec<f64> {
    fn from(s: PhaseState) -> Self {
        s.0
    }
}

/// Axis-aligned half-open box `[lower, upper)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl DomainBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidArgument(format!(
                "box bounds must have equal nonzero length ({} vs {})",
                lower.len(),
                upper.len()
            )));
        }
        for (lo, hi) in lower.iter().zip(&upper) {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidArgument(format!("empty or infinite axis [{lo}, {hi})")));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn unit(dim: usize) -> Self {
        Self { lower: vec![0.0; dim], upper: vec![1.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, s: &PhaseState) -> bool {
        s.dim() == self.dim()
            && s.coords().iter().zip(self.lower.iter().zip(&self.upper)).all(|(x, (lo, hi))| lo <= x && x < hi)
    }

    /// Uniform sample from the box; always inside.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PhaseState {
        let coords = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| {
                let x = lo + rng.random::<f64>() * (hi - lo);
                // lo + u*(hi-lo) can round up to hi
                if x < hi {
                    x
                } else {
                    lo
                }
            })
            .collect();
        PhaseState(coords)
    }
}

/// Which map a [`MapSystem`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum MapKind {
    Cat,
    Doubling,
    Standard { k: f64 },
}

impl MapKind {
    pub fn name(&self) -> &'static str {
        match self {
            MapKind::Cat => "cat",
            MapKind::Doubling => "doubling",
            MapKind::Standard { .. } => "standard",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SystemSpec {
    #[serde(flatten)]
    kind: MapKind,
    #[serde(default = "default_dt")]
    dt: f64,
}

fn default_dt() -> f64 {
    1.0
}

/// A deterministic self-map of the unit torus together with its time step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemSpec", into = "SystemSpec")]
pub struct MapSystem {
    kind: MapKind,
    domain: DomainBox,
    dt: f64,
}

impl TryFrom<SystemSpec> for MapSystem {
    type Error = Error;

    fn try_from(spec: SystemSpec) -> Result<Self> {
        MapSystem::new(spec.kind, spec.dt)
    }
}

impl From<MapSystem> for SystemSpec {
    fn from(s: MapSystem) -> Self {
        SystemSpec { kind: s.kind, dt: s.dt }
    }
}

impl MapSystem {
    pub fn new(kind: MapKind, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidSystem(format!("dt must be positive, got {dt}")));
        }
        if let MapKind::Standard { k } = kind {
            if !k.is_finite() {
                return Err(Error::InvalidSystem(format!("kick strength must be finite, got {k}")));
            }
        }
        Ok(Self { kind, domain: DomainBox::unit(2), dt })
    }

    pub fn cat() -> Self {
        Self::new(MapKind::Cat, 1.0).expect("valid")
    }

    pub fn doubling() -> Self {
        Self::new(MapKind::Doubling, 1.0).expect("valid")
    }

    pub fn standard(k: f64) -> Result<Self> {
        Self::new(MapKind::Standard { k }, 1.0)
    }

    pub fn with_dt(self, dt: f64) -> Result<Self> {
        Self::new(self.kind, dt)
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Applies the map once.
    pub fn step(&self, s: &PhaseState) -> Result<PhaseState> {
        if !self.domain.contains(s) {
            return Err(Error::OutOfDomain { state: s.coords().to_vec() });
        }
        let (q, p) = (s.coords()[0], s.coords()[1]);
        let (q1, p1) = match self.kind {
            MapKind::Cat => (wrap_unit(2.0 * q + p), wrap_unit(q + p)),
            MapKind::Doubling => (double_on_lattice(q), p),
            MapKind::Standard { k } => {
                let p1 = p + k / (2.0 * PI) * (2.0 * PI * q).sin();
                (wrap_unit(q + p1), wrap_unit(p1))
            }
        };
        Ok(PhaseState(vec![q1, p1]))
    }

    /// Potential energy term of the map's generating Lagrangian.
    pub fn potential(&self, s: &PhaseState) -> f64 {
        match self.kind {
            MapKind::Standard { k } => k / (4.0 * PI * PI) * (2.0 * PI * s.position(0)).cos(),
            MapKind::Cat | MapKind::Doubling => 0.0,
        }
    }

    pub fn kinetic(&self, s: &PhaseState) -> f64 {
        (0..s.dof()).map(|i| 0.5 * s.momentum(i).powi(2)).sum()
    }
}

/// Reduces to `[0, 1)`; `rem_euclid` alone can return exactly 1.0 for tiny
/// negative inputs.
fn wrap_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

fn double_on_lattice(x: f64) -> f64 {
    let m = DOUBLING_MODULUS as f64;
    let a = (x * m).round() as u64 % DOUBLING_MODULUS;
    ((2 * a) % DOUBLING_MODULUS) as f64 / m
}

pub fn step_map(system: &MapSystem, s: &PhaseState) -> Result<PhaseState> {
    system.step(s)
}

/// A finite orbit segment sampled every `dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    states: Vec<PhaseState>,
    dt: f64,
}

impl Trajectory {
    pub fn new(states: Vec<PhaseState>, dt: f64) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::TrajectoryTooShort { len: 0, min: 1 });
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        Ok(Self { states, dt })
    }

    pub fn states(&self) -> &[PhaseState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn first(&self) -> &PhaseState {
        &self.states[0]
    }

    /// Keeps the first `len` states.
    pub fn truncated(mut self, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::TrajectoryTooShort { len: 0, min: 1 });
        }
        self.states.truncate(len);
        Ok(self)
    }
}

/// Returns the `n + 1` states `s0, f(s0), .., f^n(s0)`.
pub fn integrate_trajectory(system: &MapSystem, s0: &PhaseState, n: usize) -> Result<Trajectory> {
    if n == 0 {
        return Err(Error::InvalidArgument("step count must be at least 1".into()));
    }
    let mut states = Vec::with_capacity(n + 1);
    states.push(s0.clone());
    for k in 0..n {
        let next = system.step(&states[k])?;
        states.push(next);
    }
    Trajectory::new(states, system.dt())
}

/// Integrates independent initial states in parallel. The output order
/// follows `starts` and is identical to a sequential loop.
pub fn integrate_many(system: &MapSystem, starts: &[PhaseState], n: usize) -> Result<Vec<Trajectory>> {
    starts.par_iter().map(|s| integrate_trajectory(system, s, n)).collect()
}

/// Regular grid over a box; cells are half-open, axis 0 varies fastest in
/// the flat index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellPartition {
    domain: DomainBox,
    resolution: Vec<usize>,
}

impl CellPartition {
    pub fn new(domain: DomainBox, resolution: Vec<usize>) -> Result<Self> {
        if resolution.len() != domain.dim() {
            return Err(Error::InvalidPartition(format!(
                "{} resolutions for a {}-dimensional domain",
                resolution.len(),
                domain.dim()
            )));
        }
        if resolution.contains(&0) {
            return Err(Error::InvalidPartition("resolution must be at least 1 per axis".into()));
        }
        resolution
            .iter()
            .try_fold(1usize, |acc, &r| acc.checked_mul(r))
            .ok_or_else(|| Error::InvalidPartition("cell count overflows".into()))?;
        Ok(Self { domain, resolution })
    }

    /// Grid over the unit box of matching dimension.
    pub fn unit_grid(resolution: &[usize]) -> Result<Self> {
        Self::new(DomainBox::unit(resolution.len().max(1)), resolution.to_vec())
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn cell_count(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn cell_index(&self, s: &PhaseState) -> Result<usize> {
        if !self.domain.contains(s) {
            return Err(Error::OutOfDomain { state: s.coords().to_vec() });
        }
        let mut flat = 0;
        let mut stride = 1;
        for (axis, &x) in s.coords().iter().enumerate() {
            let (lo, hi) = (self.domain.lower[axis], self.domain.upper[axis]);
            let n = self.resolution[axis];
            let i = (((x - lo) / (hi - lo)) * n as f64).floor() as usize;
            flat += i.min(n - 1) * stride;
            stride *= n;
        }
        Ok(flat)
    }

    pub fn check_cell(&self, cell: usize) -> Result<()> {
        if cell < self.cell_count() {
            Ok(())
        } else {
            Err(Error::InvalidCell { cell, cells: self.cell_count() })
        }
    }

    /// Per-axis grid coordinates of a flat cell index.
    pub fn cell_coords(&self, cell: usize) -> Result<Vec<usize>> {
        self.check_cell(cell)?;
        let mut rest = cell;
        Ok(self
            .resolution
            .iter()
            .map(|&n| {
                let i = rest % n;
                rest /= n;
                i
            })
            .collect())
    }

    pub fn cell_id(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.resolution.len() {
            return Err(Error::DimensionMismatch { expected: self.resolution.len(), got: coords.len() });
        }
        let mut flat = 0;
        let mut stride = 1;
        for (&i, &n) in coords.iter().zip(&self.resolution) {
            if i >= n {
                return Err(Error::InvalidPartition(format!("grid coordinate {i} >= resolution {n}")));
            }
            flat += i * stride;
            stride *= n;
        }
        Ok(flat)
    }

    pub fn cell_bounds(&self, cell: usize) -> Result<DomainBox> {
        let coords = self.cell_coords(cell)?;
        let (mut lower, mut upper) = (Vec::new(), Vec::new());
        for (axis, &i) in coords.iter().enumerate() {
            let (lo, hi) = (self.domain.lower[axis], self.domain.upper[axis]);
            let w = (hi - lo) / self.resolution[axis] as f64;
            lower.push(lo + i as f64 * w);
            upper.push(if i + 1 == self.resolution[axis] { hi } else { lo + (i + 1) as f64 * w });
        }
        DomainBox::new(lower, upper)
    }

    /// Uniform sample inside a cell, rejecting the rare draw that rounds
    /// across a cell boundary.
    pub fn sample_in_cell<R: Rng + ?Sized>(&self, cell: usize, rng: &mut R) -> Result<PhaseState> {
        let bounds = self.cell_bounds(cell)?;
        loop {
            let s = bounds.sample(rng);
            if self.cell_index(&s)? == cell {
                return Ok(s);
            }
        }
    }
}

pub fn cell_index(partition: &CellPartition, s: &PhaseState) -> Result<usize> {
    partition.cell_index(s)
}

/// Arithmetic mean of `observable` over the trajectory states.
pub fn time_average<F>(traj: &Trajectory, observable: F) -> f64
where
    F: Fn(&PhaseState) -> f64,
{
    traj.states.iter().map(&observable).sum::<f64>() / traj.len() as f64
}

/// Monte Carlo mean of `observable` under the uniform (invariant) measure of
/// the system's domain.
pub fn space_average<F>(system: &MapSystem, observable: F, samples: usize, seed: u64) -> Result<f64>
where
    F: Fn(&PhaseState) -> f64,
{
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sum: f64 = (0..samples).map(|_| observable(&system.domain.sample(&mut rng))).sum();
    Ok(sum / samples as f64)
}

/// True iff every value in `series` lies within `epsilon` of `zeta`.
///
/// The comparison allows a few ulps of slack so that a deviation written
/// exactly at the bound (`1.05` against `1.0 ± 0.05`) is accepted despite
/// the subtraction rounding up.
pub fn steady_state_check(series: &[f64], zeta: f64, epsilon: f64) -> Result<bool> {
    if series.is_empty() {
        return Err(Error::InvalidArgument("series is empty".into()));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be >= 0, got {epsilon}")));
    }
    Ok(series.iter().all(|v| {
        let slack = 4.0 * f64::EPSILON * v.abs().max(zeta.abs()).max(epsilon);
        (v - zeta).abs() <= epsilon + slack
    }))
}
