//! Config-driven experiment runner.
//!
//! A run is described by one JSON [`ExperimentConfig`]. [`prepare`] checks
//! it against the requested [`Command`] (configuration errors), [`execute`]
//! runs it (runtime errors) and [`output`] writes the report files.
//!
//! ```json
//! {
//!   "seed": 42,
//!   "kb": 1.0,
//!   "system": { "map": "standard", "k": 6.0, "dt": 1.0 },
//!   "partition": { "resolution": [16, 16] },
//!   "source": 0,
//!   "target": 136,
//!   "replicas": 10000,
//!   "horizon": 50,
//!   "output": { "svg": true }
//! }
//! ```

pub mod output;

use std::f64::consts::E;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    integrate_trajectory, space_average, steady_state_check, time_average, CellPartition, MapSystem, PhaseState,
};
use crate::ensemble::{
    estimate_distribution, simulate_paths, EnsembleRequest, PathDistribution, PathEnsemble, ReplicaInit,
};
use crate::entropy::{hash_json, EntropyReport, ThermoAccount};
use crate::error::Error;
use crate::maxent::{partition_identity_check, solve_maxent, MaxEntSolution};
use crate::stochorder::{
    build_coupling, cdf_table, compare_paths, gradient_order, greatest_path, usual_order, Coupling, DiscreteRV,
    PathOrderResult, UsualOrder,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Maxent,
    Entropy,
    Order,
    Ergodic,
    Pipeline,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Command::Simulate => "simulate",
            Command::Maxent => "maxent",
            Command::Entropy => "entropy",
            Command::Order => "order",
            Command::Ergodic => "ergodic",
            Command::Pipeline => "pipeline",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub resolution: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    X,
    X2,
    Sin2pix,
}

impl Observable {
    pub fn eval(&self, s: &PhaseState) -> f64 {
        let x = s.position(0);
        match self {
            Observable::X => x,
            Observable::X2 => x * x,
            Observable::Sin2pix => (2.0 * std::f64::consts::PI * x).sin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicSpec {
    pub observables: Vec<Observable>,
    pub steps: usize,
    pub samples: usize,
    /// Random (seeded) start when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<PhaseState>,
    /// Number of running time averages fed to the steady-state check.
    #[serde(default = "default_checkpoints")]
    pub checkpoints: usize,
    /// Steady-state band; defaults to `5 / sqrt(steps)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

fn default_checkpoints() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrderSpec {
    /// Usual stochastic order between two random variables.
    RandomVariables { x: DiscreteRV, y: DiscreteRV },
    /// Path order within one distribution.
    Paths { distribution: PathDistribution },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    #[serde(default)]
    pub svg: bool,
}

fn default_kb() -> f64 {
    1.0
}

/// Every section is optional at parse time; [`prepare`] checks that the
/// chosen command has what it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// If present, must name the command being run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_kb")]
    pub kb: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<MapSystem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicas: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default)]
    pub init: ReplicaInit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub account: Option<ThermoAccount>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<PathDistribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actions: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<OrderSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ergodic: Option<ErgodicSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, Error> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        hash_json(self)
    }
}

/// A configuration error (exit 2) or a failure while running (exit 3).
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Config(Error),
    Runtime(Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e @ Error::Config(_)) => write!(f, "{e}"),
            RunError::Config(e) => write!(f, "configuration error: {e}"),
            RunError::Runtime(e) => write!(f, "runtime error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

fn config_err(e: Error) -> RunError {
    RunError::Config(e)
}

fn runtime_err(e: Error) -> RunError {
    RunError::Runtime(e)
}

fn missing(field: &str, command: Command) -> RunError {
    RunError::Config(Error::Config(format!("`{field}` is required for `{command}`")))
}

/// Validated, typed inputs of one run.
#[derive(Debug, Clone)]
pub struct Plan {
    pub command: Command,
    pub seed: u64,
    pub kb: f64,
    pub config_hash: String,
    pub svg: bool,
    task: Task,
}

#[derive(Debug, Clone)]
enum Task {
    Ensemble { system: MapSystem, partition: CellPartition, request: EnsembleRequest },
    Maxent { actions: Vec<f64>, target_mean: f64 },
    Entropy { account: Option<ThermoAccount>, distribution: Option<PathDistribution> },
    Order(OrderSpec),
    Ergodic { system: MapSystem, spec: ErgodicSpec },
}

/// Checks `config` for `command`, applying a seed override.
pub fn prepare(command: Command, mut config: ExperimentConfig, seed_override: Option<u64>) -> Result<Plan, RunError> {
    if let Some(c) = config.command {
        if c != command {
            return Err(config_err(Error::Config(format!("config is for `{c}`, not `{command}`"))));
        }
    }
    config.command = Some(command);
    if seed_override.is_some() {
        config.seed = seed_override;
    }
    let seed = config.seed.ok_or_else(|| missing("seed", command))?;
    if !(config.kb.is_finite() && config.kb > 0.0) {
        return Err(config_err(Error::InvalidBoltzmann(config.kb)));
    }
    let config_hash = config.hash();

    let task = match command {
        Command::Simulate | Command::Pipeline => {
            let system = config.system.clone().ok_or_else(|| missing("system", command))?;
            let resolution = &config.partition.as_ref().ok_or_else(|| missing("partition", command))?.resolution;
            let partition = CellPartition::new(system.domain().clone(), resolution.clone()).map_err(config_err)?;
            let source = config.source.ok_or_else(|| missing("source", command))?;
            let target = config.target.ok_or_else(|| missing("target", command))?;
            partition.check_cell(source).map_err(config_err)?;
            partition.check_cell(target).map_err(config_err)?;
            if source == target {
                return Err(config_err(Error::Config("source and target cells must differ".into())));
            }
            let replicas = config.replicas.ok_or_else(|| missing("replicas", command))?;
            let horizon = config.horizon.ok_or_else(|| missing("horizon", command))?;
            if replicas == 0 || horizon == 0 {
                return Err(config_err(Error::Config("replicas and horizon must be at least 1".into())));
            }
            let request = EnsembleRequest::new(source, target, replicas, horizon, seed).with_init(config.init.clone());
            Task::Ensemble { system, partition, request }
        }
        Command::Maxent => Task::Maxent {
            actions: config.actions.clone().ok_or_else(|| missing("actions", command))?,
            target_mean: config.target_mean.ok_or_else(|| missing("target_mean", command))?,
        },
        Command::Entropy => {
            if config.account.is_none() && config.distribution.is_none() {
                return Err(missing("account` or `distribution", command));
            }
            if let Some(a) = &config.account {
                a.validate().map_err(config_err)?;
            }
            Task::Entropy { account: config.account, distribution: config.distribution.clone() }
        }
        Command::Order => Task::Order(config.order.clone().ok_or_else(|| missing("order", command))?),
        Command::Ergodic => {
            let system = config.system.clone().ok_or_else(|| missing("system", command))?;
            let spec = config.ergodic.clone().ok_or_else(|| missing("ergodic", command))?;
            if spec.steps == 0 || spec.samples == 0 || spec.checkpoints == 0 || spec.observables.is_empty() {
                return Err(config_err(Error::Config(
                    "ergodic needs steps, samples, checkpoints >= 1 and at least one observable".into(),
                )));
            }
            if let Some(s) = &spec.start {
                if !system.domain().contains(s) {
                    return Err(config_err(Error::OutOfDomain { state: s.coords().to_vec() }));
                }
            }
            Task::Ergodic { system, spec }
        }
    };
    Ok(Plan { command, seed, kb: config.kb, config_hash, svg: config.output.svg, task })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Command,
    pub seed: u64,
    pub kb: f64,
    pub config_hash: String,
    pub result: CommandResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandResult {
    Simulate(EnsembleResult),
    Pipeline(EnsembleResult),
    Maxent(MaxentResult),
    Entropy(EntropyResult),
    Order(OrderResult),
    Ergodic(ErgodicResult),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleResult {
    pub ensemble: PathEnsemble,
    pub distribution: PathDistribution,
    pub entropy: EntropyReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub greatest_paths: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition_identity: Option<IdentityCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub value: f64,
    pub expected: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxentResult {
    pub actions: Vec<f64>,
    pub solution: MaxEntSolution,
    pub shannon_entropy: f64,
    pub unit_gauge_shift: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyResult {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub macroscopic: Option<EntropyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statistical: Option<EntropyReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CdfRow {
    pub t: f64,
    pub cdf_x: f64,
    pub cdf_y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrderResult {
    RandomVariables {
        relation: UsualOrder,
        cdf_table: Vec<CdfRow>,
        /// Coupling oriented from the smaller variable to the larger one.
        #[serde(skip_serializing_if = "Option::is_none")]
        coupling: Option<Coupling>,
        /// Points where the CDFs cross, when incomparable.
        witnesses: Vec<CdfRow>,
    },
    Paths {
        comparisons: Vec<PathOrderResult>,
        orders_agree: bool,
        greatest: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableCheck {
    pub observable: Observable,
    pub time_average: f64,
    pub space_average: f64,
    pub abs_difference: f64,
    pub bound: f64,
    pub within_bound: bool,
    pub running_averages: Vec<f64>,
    pub epsilon: f64,
    pub steady_state: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErgodicResult {
    pub system: MapSystem,
    pub start: PhaseState,
    pub steps: usize,
    pub samples: usize,
    pub observables: Vec<ObservableCheck>,
}

/// Runs a prepared plan.
pub fn execute(plan: &Plan) -> Result<ExperimentReport, RunError> {
    let result = match &plan.task {
        Task::Ensemble { system, partition, request } => {
            let r = ensemble_result(system, partition, request, plan.kb, plan.command == Command::Pipeline)?;
            if plan.command == Command::Pipeline {
                CommandResult::Pipeline(r)
            } else {
                CommandResult::Simulate(r)
            }
        }
        Task::Maxent { actions, target_mean } => {
            let solution = solve_maxent(actions, *target_mean).map_err(runtime_err)?;
            let shannon_entropy =
                -solution.probabilities.iter().zip(solution.log_probabilities()).map(|(p, lp)| p * lp).sum::<f64>();
            CommandResult::Maxent(MaxentResult {
                actions: actions.clone(),
                unit_gauge_shift: solution.unit_gauge_shift(),
                shannon_entropy,
                solution,
            })
        }
        Task::Entropy { account, distribution } => CommandResult::Entropy(EntropyResult {
            macroscopic: account.as_ref().map(EntropyReport::macroscopic).transpose().map_err(runtime_err)?,
            statistical: distribution
                .as_ref()
                .map(|d| EntropyReport::statistical(d, plan.kb))
                .transpose()
                .map_err(runtime_err)?,
        }),
        Task::Order(spec) => CommandResult::Order(order_result(spec, plan.kb).map_err(runtime_err)?),
        Task::Ergodic { system, spec } => {
            CommandResult::Ergodic(ergodic_result(system, spec, plan.seed).map_err(runtime_err)?)
        }
    };
    Ok(ExperimentReport {
        tool: "pathorder",
        version: VERSION,
        command: plan.command,
        seed: plan.seed,
        kb: plan.kb,
        config_hash: plan.config_hash.clone(),
        result,
    })
}

/// [`prepare`] followed by [`execute`].
pub fn run(command: Command, config: ExperimentConfig) -> Result<ExperimentReport, RunError> {
    execute(&prepare(command, config, None)?)
}

fn ensemble_result(
    system: &MapSystem,
    partition: &CellPartition,
    request: &EnsembleRequest,
    kb: f64,
    full: bool,
) -> Result<EnsembleResult, RunError> {
    let ensemble = simulate_paths(system, partition, request).map_err(runtime_err)?;
    let distribution = estimate_distribution(&ensemble).map_err(runtime_err)?;
    let entropy = EntropyReport::statistical(&distribution, kb).map_err(runtime_err)?;
    let (greatest_paths, partition_identity) = if full {
        let labels = greatest_path(&distribution).into_iter().map(|k| distribution.labels()[k].clone()).collect();
        let value = partition_identity_check(&distribution, kb).map_err(runtime_err)?;
        (Some(labels), Some(IdentityCheck { value, expected: E, abs_error: (value - E).abs() }))
    } else {
        (None, None)
    };
    Ok(EnsembleResult { ensemble, distribution, entropy, greatest_paths, partition_identity })
}

fn order_result(spec: &OrderSpec, kb: f64) -> Result<OrderResult, Error> {
    match spec {
        OrderSpec::RandomVariables { x, y } => {
            let relation = usual_order(x, y);
            let table: Vec<CdfRow> =
                cdf_table(x, y).into_iter().map(|(t, cdf_x, cdf_y)| CdfRow { t, cdf_x, cdf_y }).collect();
            let coupling = match relation {
                UsualOrder::LessEq | UsualOrder::Equal => Some(build_coupling(x, y)?),
                UsualOrder::GreaterEq => Some(build_coupling(y, x)?),
                UsualOrder::Incomparable => None,
            };
            let witnesses = if relation == UsualOrder::Incomparable {
                let lo = table.iter().copied().filter(|r| r.cdf_x < r.cdf_y).take(1);
                let hi = table.iter().copied().filter(|r| r.cdf_x > r.cdf_y).take(1);
                lo.chain(hi).collect()
            } else {
                Vec::new()
            };
            Ok(OrderResult::RandomVariables { relation, cdf_table: table, coupling, witnesses })
        }
        OrderSpec::Paths { distribution } => {
            let n = distribution.len();
            let mut comparisons = Vec::new();
            let mut orders_agree = true;
            for i in 0..n {
                for j in i + 1..n {
                    let by_p = compare_paths(distribution, i, j)?;
                    let by_g = gradient_order(distribution, i, j, kb)?;
                    orders_agree &= by_p.relation == by_g.relation;
                    comparisons.push(by_g);
                }
            }
            Ok(OrderResult::Paths { comparisons, orders_agree, greatest: greatest_path(distribution) })
        }
    }
}

fn ergodic_result(system: &MapSystem, spec: &ErgodicSpec, seed: u64) -> Result<ErgodicResult, Error> {
    let start = match &spec.start {
        Some(s) => s.clone(),
        None => system.domain().sample(&mut ChaCha8Rng::seed_from_u64(seed)),
    };
    let traj = integrate_trajectory(system, &start, spec.steps)?;
    let n = traj.len();
    let bound = 5.0 / (spec.steps as f64).sqrt();
    let epsilon = spec.epsilon.unwrap_or(bound);
    let checkpoints = spec.checkpoints.min(n);
    let mut observables = Vec::with_capacity(spec.observables.len());
    for (i, obs) in spec.observables.iter().enumerate() {
        let time = time_average(&traj, |s| obs.eval(s));
        // independent stream per observable
        let space = space_average(system, |s| obs.eval(s), spec.samples, seed.wrapping_add(1 + i as u64))?;
        let running = running_averages(traj.states(), |s| obs.eval(s), checkpoints);
        observables.push(ObservableCheck {
            observable: *obs,
            time_average: time,
            space_average: space,
            abs_difference: (time - space).abs(),
            bound,
            within_bound: (time - space).abs() <= bound,
            steady_state: steady_state_check(&running, space, epsilon)?,
            running_averages: running,
            epsilon,
        });
    }
    Ok(ErgodicResult { system: system.clone(), start, steps: spec.steps, samples: spec.samples, observables })
}

/// Time averages over the second half of the run, taken at `count` evenly
/// spaced end points.
fn running_averages<F: Fn(&PhaseState) -> f64>(states: &[PhaseState], f: F, count: usize) -> Vec<f64> {
    let n = states.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for s in states {
        prefix.push(prefix.last().unwrap() + f(s));
    }
    (1..=count)
        .map(|c| {
            let end = (n / 2 + (n - n / 2) * c / count).max(1);
            prefix[end] / end as f64
        })
        .collect()
}

impl EnsembleResult {
    /// Rows of the path table: rank, label, count, probability, action,
    /// travelling time.
    pub fn path_rows(&self) -> Vec<PathRow> {
        self.ensemble
            .paths()
            .iter()
            .zip(self.ensemble.counts())
            .zip(self.distribution.probabilities())
            .enumerate()
            .map(|(rank, ((path, &count), &probability))| PathRow {
                rank,
                label: path.label(),
                count,
                probability,
                action: path.action(),
                travel_time: path.travel_time(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathRow {
    pub rank: usize,
    pub label: String,
    pub count: u64,
    pub probability: f64,
    pub action: f64,
    pub travel_time: f64,
}
