use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid phase state: {0}")]
    InvalidState(String),

    #[error("state {state:?} lies outside the domain")]
    OutOfDomain { state: Vec<f64> },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("cell {cell} does not exist (partition has {cells} cells)")]
    InvalidCell { cell: usize, cells: usize },

    #[error("trajectory starts in cell {found}, expected source cell {expected}")]
    WrongStartCell { expected: usize, found: usize },

    #[error("trajectory has {len} states, need at least {min}")]
    TrajectoryTooShort { len: usize, min: usize },

    #[error("invalid ensemble request: {0}")]
    InvalidEnsemble(String),

    #[error("no replica reached the target cell ({unresolved} unresolved)")]
    NoResolvedPaths { unresolved: u64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("index {index} out of range for {len} paths")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("probability {0} is not strictly positive; the entropy gradient diverges")]
    NonPositiveProbability(f64),

    #[error("perturbation does not conserve probability (sum = {0:e})")]
    UnnormalizedPerturbation(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-positive temperature: {0} K")]
    NonPositiveTemperature(f64),

    #[error("Boltzmann constant must be positive and finite, got {0}")]
    InvalidBoltzmann(f64),

    #[error("probability reconstruction overflowed for gradient {0}")]
    Overflow(f64),

    #[error("target mean {target} outside action range [{min}, {max}]")]
    TargetOutOfRange { target: f64, min: f64, max: f64 },

    #[error("all actions equal {action} but target mean is {target}")]
    DegenerateActions { action: f64, target: f64 },

    #[error("root search failed: {0}")]
    RootSearch(String),

    #[error("action is zero; the multiplier is undefined")]
    ZeroAction,

    #[error("invalid random variable: {0}")]
    InvalidRandomVariable(String),

    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),

    #[error("not stochastically ordered: F_X({witness}) = {cdf_x} < F_Y({witness}) = {cdf_y}")]
    NotOrdered { witness: f64, cdf_x: f64, cdf_y: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
