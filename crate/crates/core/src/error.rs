use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("level {level} is not a partition of the action set: {detail}")]
    NotAPartition { level: usize, detail: String },

    #[error("level {level} is not nested in level {}: class {class} straddles several parents", .level - 1)]
    NotNested { level: usize, class: usize },

    #[error("level {level} contains an empty class")]
    EmptyClass { level: usize },

    #[error("action index {index} out of range for {n} actions")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("level {level} out of range (tree depth {depth})")]
    LevelOutOfRange { level: usize, depth: usize },

    #[error("class handle does not belong to this tree")]
    InvalidClass,

    #[error("invalid action labels: {0}")]
    InvalidLabels(String),

    #[error("invalid population state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("payoff of action {action} is not finite")]
    NonFinitePayoff { action: usize },

    #[error("class has zero mass; its mean payoff is undefined")]
    EmptyClassMass,

    #[error("operation unsupported for {0} games")]
    UnsupportedKind(&'static str),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid integrator settings: {0}")]
    InvalidIntegrator(String),

    #[error("state became non-finite at step {step}")]
    StepBlowup { step: usize },

    #[error("field evaluation failed inside step {step}: {reason}")]
    StepFailed { step: usize, reason: String },

    #[error("share of action {action} lost positivity at step {step}")]
    PositivityLoss { step: usize, action: usize },

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("reference point charges a class of zero mass")]
    SupportMismatch,

    #[error("tail window holds {points} samples; at least {required} needed")]
    WindowTooShort { points: usize, required: usize },

    #[error("action {action} is not strictly dominated")]
    NotDominated { action: usize },

    #[error("candidate is not a GESS: <F(x), x - x*> = {value:e} >= 0 at a sampled state")]
    NotGess { value: f64 },

    #[error("trajectory has not converged: terminal diameter {diameter:e} exceeds {tol:e}")]
    NotConverged { diameter: f64, tol: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
