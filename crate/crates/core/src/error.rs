use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state space must contain at least one state")]
    EmptyStateSpace,
    #[error("state {state} is out of range for a space of {states} states")]
    StateOutOfRange { state: usize, states: usize },
    #[error("expected {expected} lag states, got {got}")]
    WrongLagCount { expected: usize, got: usize },
    #[error("order mismatch: model has order {model}, data has order {data}")]
    OrderMismatch { model: usize, data: usize },
    #[error("state space mismatch: model has {model} states, data has {data}")]
    StateSpaceMismatch { model: usize, data: usize },
    #[error("invalid generation order: {0}")]
    InvalidSgo(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("maximum probability {p_star} is below the feasibility floor 1/{states}")]
    InfeasibleMaximum { p_star: f64, states: usize },
    #[error("cannot pool an empty component")]
    EmptyComponent,
    #[error("intractable configuration: {0}")]
    Intractable(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
