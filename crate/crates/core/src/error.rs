use thiserror::Error;

/// Errors raised by the discretization and its drivers.
///
/// Scalar payloads are stored as `f64` so that the type stays independent of
/// the scalar the solver is instantiated with.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial degree {0} outside supported range 1..=8")]
    UnsupportedDegree(usize),

    #[error("state outside the admissible set (rho = {rho:e}, p = {p:e})")]
    Inadmissible { rho: f64, p: f64 },

    #[error("log mean requires positive arguments, got ({0:e}, {1:e})")]
    NonPositiveMean(f64, f64),

    #[error("parameter `{name}` must be positive, got {value:e}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("invalid equilibrium: {0}")]
    Equilibrium(String),

    #[error("inadmissible node at t = {time:e}: cell {cell}, node {node} (rho = {rho:e}, p = {p:e})")]
    InadmissibleNode {
        cell: usize,
        node: usize,
        time: f64,
        rho: f64,
        p: f64,
    },

    #[error("cell {cell} has an inadmissible average (rho = {rho:e}, p = {p:e})")]
    InadmissibleAverage { cell: usize, rho: f64, p: f64 },

    #[error("time step {0:e} is not positive and finite")]
    InvalidTimeStep(f64),

    #[error("time step {dt:e} exceeds the positivity bound {bound:e} of a stage state")]
    StageBound { dt: f64, bound: f64 },

    #[error("time step collapsed to {dt:e} at t = {time:e}")]
    TimeStepCollapse { dt: f64, time: f64 },

    #[error("stage {stage}: {source}")]
    Stage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("shape mismatch: expected {expected} values, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// Strips stage wrappers and returns the underlying numerical failure.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// Whether the error reports a state outside the admissible set.
    pub fn is_inadmissible(&self) -> bool {
        matches!(
            self.root(),
            Error::Inadmissible { .. } | Error::InadmissibleNode { .. } | Error::InadmissibleAverage { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
