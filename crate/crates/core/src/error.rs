use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error("subgradient norm {norm} exceeds declared Lipschitz constant {lipschitz}")]
    LipschitzViolation { norm: f64, lipschitz: f64 },

    #[error("inner solver did not converge after {iterations} iterations (last movement {movement:e})")]
    NonConvergence { iterations: usize, movement: f64 },

    #[error("augmented path length decreased from {previous} to {current}")]
    PathDecreased { previous: f64, current: f64 },

    #[error("observed-path regularization needs the comparator of slot {slot}")]
    MissingComparator { slot: usize },

    #[error("invariant violated at slot {slot}: {inequality}")]
    InvariantViolation { slot: usize, inequality: String },

    #[error("bound/trace mismatch: {0}")]
    StrategyMismatch(String),

    #[error("slot {slot} outside horizon 1..={horizon}")]
    SlotOutOfRange { slot: usize, horizon: usize },

    #[error("grid resolution {resolution} leaves only {points} feasible points")]
    ResolutionTooCoarse { resolution: f64, points: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
