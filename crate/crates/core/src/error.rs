use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector must have at least one coordinate")]
    EmptyVector,

    #[error("vector coordinate {index} is not finite")]
    NonFinite { index: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("direction vector is degenerate (zero length within tolerance)")]
    DegenerateDirection,

    #[error("fusion weight {0} outside [0, 1]")]
    AlphaOutOfRange(f64),

    #[error("fusion weight {0} is saturated at 1; attacker response is unconstrained")]
    AlphaSaturated(f64),

    #[error("{name} must be nonnegative, got {value}")]
    NegativeVariance { name: &'static str, value: f64 },

    #[error("mismatch budget {0} outside [0, 1]")]
    BudgetOutOfRange(f64),

    #[error("no non-trivial initial condition found after {rejections} rejections")]
    SamplingExhausted { rejections: usize },

    #[error("degenerate game: sensor estimate coincides with the attacker-side mean")]
    DegenerateGame,

    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),

    #[error("attacker-side mean differs from sensor-side mean; equal-means form does not apply")]
    ParamsMismatch,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
