//! Replica ensembles between two phase-space cells.
//!
//! `L` replicas start inside a source cell and are followed until they first
//! enter a target cell. Each arriving replica is classified by the sequence
//! of cells it visited (consecutive repeats collapsed); the relative
//! frequency of each class is its path probability `L_k / L`.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{CellPartition, MapSystem, PhaseState, Trajectory};
use crate::error::{Error, Result};

/// Tolerance on `Σ p_k = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Cell sequence of one trajectory up to its first entry into the target.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathSignature {
    /// Visited cells with consecutive duplicates collapsed.
    pub cells: Vec<usize>,
    /// Index of the first state inside the target cell.
    pub entry_step: usize,
}

/// Visited cells from the start of `traj` until it first enters `target`.
///
/// Returns `Ok(None)` when the target is never entered.
pub fn path_signature(
    traj: &Trajectory,
    partition: &CellPartition,
    source: usize,
    target: usize,
) -> Result<Option<PathSignature>> {
    let start = partition.cell_index(traj.first())?;
    if start != source {
        return Err(Error::WrongStartCell { expected: source, found: start });
    }
    let mut cells = vec![start];
    if start == target {
        return Ok(Some(PathSignature { cells, entry_step: 0 }));
    }
    for (step, s) in traj.states().iter().enumerate().skip(1) {
        let c = partition.cell_index(s)?;
        if cells.last() != Some(&c) {
            cells.push(c);
        }
        if c == target {
            return Ok(Some(PathSignature { cells, entry_step: step }));
        }
    }
    Ok(None)
}

/// Discrete mechanical action `Σ (T - V) dt` over every step of `traj`,
/// evaluating the Lagrangian at the state each step leaves from.
pub fn path_action(traj: &Trajectory, system: &MapSystem) -> Result<f64> {
    if traj.len() < 2 {
        return Err(Error::TrajectoryTooShort { len: traj.len(), min: 2 });
    }
    let steps = &traj.states()[..traj.len() - 1];
    Ok(steps.iter().map(|s| system.kinetic(s) - system.potential(s)).sum::<f64>() * traj.dt())
}

/// A path class: its signature, travelling time and mean action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    signature: Vec<usize>,
    travel_time: f64,
    action: f64,
}

impl Path {
    /// Travelling time is `(signature.len() - 1) * dt`.
    pub fn new(signature: Vec<usize>, dt: f64, action: f64) -> Result<Self> {
        if signature.len() < 2 {
            return Err(Error::InvalidEnsemble("a path needs distinct source and target cells".into()));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        let travel_time = (signature.len() - 1) as f64 * dt;
        Ok(Self { signature, travel_time, action })
    }

    pub fn signature(&self) -> &[usize] {
        &self.signature
    }

    pub fn travel_time(&self) -> f64 {
        self.travel_time
    }

    pub fn action(&self) -> f64 {
        self.action
    }

    pub fn source(&self) -> usize {
        self.signature[0]
    }

    pub fn target(&self) -> usize {
        *self.signature.last().expect("nonempty")
    }

    /// `"3-7-9"`.
    pub fn label(&self) -> String {
        self.signature.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("-")
    }
}

/// How replicas are placed in the source cell.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplicaInit {
    #[default]
    Uniform,
    /// Every replica starts at the same state.
    Point(PhaseState),
}

/// Parameters of one ensemble run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRequest {
    pub source: usize,
    pub target: usize,
    pub replicas: u64,
    pub horizon: usize,
    pub seed: u64,
    #[serde(default)]
    pub init: ReplicaInit,
}

impl EnsembleRequest {
    pub fn new(source: usize, target: usize, replicas: u64, horizon: usize, seed: u64) -> Self {
        Self { source, target, replicas, horizon, seed, init: ReplicaInit::Uniform }
    }

    pub fn with_init(mut self, init: ReplicaInit) -> Self {
        self.init = init;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMetadata {
    pub system: MapSystem,
    pub partition: CellPartition,
    pub request: EnsembleRequest,
}

/// Outcome of one replica.
#[derive(Debug, Clone, PartialEq)]
pub struct PathObservation {
    pub cells: Vec<usize>,
    pub action: f64,
}

/// Distinct paths observed in an ensemble with their replica counts.
///
/// Paths are ordered by decreasing count, ties by signature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEnsemble {
    paths: Vec<Path>,
    counts: Vec<u64>,
    total: u64,
    unresolved: u64,
    /// Probabilities are taken over resolved replicas only.
    renormalized_over_resolved: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    metadata: Option<EnsembleMetadata>,
}

impl PathEnsemble {
    /// Groups replica outcomes (`None` = never reached the target) into
    /// path classes. The mean action of each class is accumulated in input
    /// order.
    pub fn tally<I>(observations: I, dt: f64) -> Result<Self>
    where
        I: IntoIterator<Item = Option<PathObservation>>,
    {
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut classes: Vec<(Vec<usize>, u64, f64)> = Vec::new();
        let (mut total, mut unresolved) = (0u64, 0u64);
        for obs in observations {
            total += 1;
            let Some(obs) = obs else {
                unresolved += 1;
                continue;
            };
            match index.get(&obs.cells) {
                Some(&i) => {
                    classes[i].1 += 1;
                    classes[i].2 += obs.action;
                }
                None => {
                    index.insert(obs.cells.clone(), classes.len());
                    classes.push((obs.cells, 1, obs.action));
                }
            }
        }
        if total == 0 {
            return Err(Error::InvalidEnsemble("ensemble needs at least one replica".into()));
        }
        classes.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let mut paths = Vec::with_capacity(classes.len());
        let mut counts = Vec::with_capacity(classes.len());
        for (cells, count, action_sum) in classes {
            paths.push(Path::new(cells, dt, action_sum / count as f64)?);
            counts.push(count);
        }
        Ok(Self { paths, counts, total, unresolved, renormalized_over_resolved: true, metadata: None })
    }

    pub fn with_metadata(mut self, metadata: EnsembleMetadata) -> Self {
        self.metadata = Some(metadata);
        self
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn unresolved(&self) -> u64 {
        self.unresolved
    }

    pub fn resolved(&self) -> u64 {
        self.total - self.unresolved
    }

    /// Number of distinct paths `ω`.
    pub fn path_count(&self) -> usize {
        self.paths.len()
    }

    pub fn metadata(&self) -> Option<&EnsembleMetadata> {
        self.metadata.as_ref()
    }
}

/// Runs `request.replicas` replicas and classifies their paths.
///
/// Replica `i` draws its start from a ChaCha8 stream keyed by
/// `(request.seed, i)`, so the result does not depend on the thread count.
pub fn simulate_paths(
    system: &MapSystem,
    partition: &CellPartition,
    request: &EnsembleRequest,
) -> Result<PathEnsemble> {
    if partition.domain() != system.domain() {
        return Err(Error::InvalidPartition("partition must cover the system's domain".into()));
    }
    partition.check_cell(request.source)?;
    partition.check_cell(request.target)?;
    if request.source == request.target {
        return Err(Error::InvalidEnsemble("source and target cells must differ".into()));
    }
    if request.replicas == 0 {
        return Err(Error::InvalidEnsemble("replica count must be at least 1".into()));
    }
    if request.horizon == 0 {
        return Err(Error::InvalidEnsemble("horizon must be at least 1 step".into()));
    }
    if let ReplicaInit::Point(s) = &request.init {
        let c = partition.cell_index(s)?;
        if c != request.source {
            return Err(Error::WrongStartCell { expected: request.source, found: c });
        }
    }

    let outcomes: Vec<Option<PathObservation>> = (0..request.replicas)
        .into_par_iter()
        .map(|i| run_replica(system, partition, request, i))
        .collect::<Result<_>>()?;
    Ok(PathEnsemble::tally(outcomes, system.dt())?.with_metadata(EnsembleMetadata {
        system: system.clone(),
        partition: partition.clone(),
        request: request.clone(),
    }))
}

fn run_replica(
    system: &MapSystem,
    partition: &CellPartition,
    request: &EnsembleRequest,
    index: u64,
) -> Result<Option<PathObservation>> {
    let s0 = match &request.init {
        ReplicaInit::Point(s) => s.clone(),
        ReplicaInit::Uniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(request.seed);
            rng.set_stream(index);
            partition.sample_in_cell(request.source, &mut rng)?
        }
    };
    let mut states = vec![s0];
    for _ in 0..request.horizon {
        let next = system.step(states.last().expect("nonempty"))?;
        let arrived = partition.cell_index(&next)? == request.target;
        states.push(next);
        if arrived {
            break;
        }
    }
    let traj = Trajectory::new(states, system.dt())?;
    let Some(sig) = path_signature(&traj, partition, request.source, request.target)? else {
        return Ok(None);
    };
    let traj = traj.truncated(sig.entry_step + 1)?;
    Ok(Some(PathObservation { cells: sig.cells, action: path_action(&traj, system)? }))
}

/// Path probabilities with their actions and labels; every `p_k > 0` and
/// `Σ p_k = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct PathDistribution {
    labels: Vec<String>,
    probabilities: Vec<f64>,
    actions: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDistribution {
    #[serde(default)]
    labels: Option<Vec<String>>,
    probabilities: Vec<f64>,
    #[serde(default)]
    actions: Option<Vec<f64>>,
}

impl TryFrom<RawDistribution> for PathDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        let n = raw.probabilities.len();
        let labels = raw.labels.unwrap_or_else(|| default_labels(n));
        let actions = raw.actions.unwrap_or_else(|| vec![0.0; n]);
        Self::new(raw.probabilities, actions, labels)
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

impl PathDistribution {
    pub fn new(probabilities: Vec<f64>, actions: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        let n = probabilities.len();
        if n == 0 {
            return Err(Error::InvalidDistribution("at least one path is required".into()));
        }
        if actions.len() != n || labels.len() != n {
            return Err(Error::InvalidDistribution(format!(
                "length mismatch: {n} probabilities, {} actions, {} labels",
                actions.len(),
                labels.len()
            )));
        }
        if let Some(&p) = probabilities.iter().find(|p| !(p.is_finite() && **p > 0.0 && **p <= 1.0)) {
            return Err(Error::InvalidDistribution(format!("probability {p} outside (0, 1]")));
        }
        if let Some(a) = actions.iter().find(|a| !a.is_finite()) {
            return Err(Error::InvalidDistribution(format!("non-finite action {a}")));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {sum}")));
        }
        Ok(Self { labels, probabilities, actions })
    }

    /// Zero actions and index labels.
    pub fn from_probabilities(probabilities: Vec<f64>) -> Result<Self> {
        let n = probabilities.len();
        Self::new(probabilities, vec![0.0; n], default_labels(n))
    }

    /// Normalizes positive weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        Self::from_probabilities(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_weights(&vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn actions(&self) -> &[f64] {
        &self.actions
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probability(&self, k: usize) -> Result<f64> {
        self.probabilities.get(k).copied().ok_or(Error::IndexOutOfRange { index: k, len: self.len() })
    }

    pub fn action(&self, k: usize) -> Result<f64> {
        self.actions.get(k).copied().ok_or(Error::IndexOutOfRange { index: k, len: self.len() })
    }
}

/// `p_k = L_k / Σ_j L_j` over resolved replicas.
pub fn estimate_distribution(ens: &PathEnsemble) -> Result<PathDistribution> {
    let resolved = ens.resolved();
    if resolved == 0 {
        return Err(Error::NoResolvedPaths { unresolved: ens.unresolved() });
    }
    let probabilities = ens.counts.iter().map(|&c| c as f64 / resolved as f64).collect();
    let actions = ens.paths.iter().map(Path::action).collect();
    let labels = ens.paths.iter().map(Path::label).collect();
    PathDistribution::new(probabilities, actions, labels)
}
