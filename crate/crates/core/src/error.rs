use thiserror::Error;

#[derive(Debug, Error)]
pub enum QbtError {
    #[error("quaternion has zero norm and no inverse")]
    ZeroDivisor,
    #[error("grid mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid {ns}x{nt} exceeds the brute-force limit of {limit}x{limit}")]
    GridTooLarge { ns: usize, nt: usize, limit: usize },
    #[error("scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("probe ({0}, {1}) lies on the light cone")]
    ProbeOnLightCone(f64, f64),
    #[error("admissibility integral is not finite and positive: {0}")]
    NonFiniteAdmissibility(f64),
    #[error("admissibility constant has not been computed for this system")]
    AdmissibilityNotComputed,
    #[error("coefficients were produced by a different boostlet system")]
    SystemMismatch,
    #[error("operation needs a real window but the window coupling has a j or k part")]
    QuaternionWindow,
    #[error("signal is identically zero")]
    ZeroSignal,
    #[error("lambda = {0} is outside [0, 2)")]
    LambdaOutOfRange(f64),
    #[error("power constant unavailable for m = {m}, n = {n} (needs m, n >= 1)")]
    ConstantUnavailable { m: f64, n: f64 },
    #[error("empty coefficient array")]
    EmptyArray,
    #[error("threshold fraction {0} is outside (0, 1)")]
    InvalidThreshold(f64),
    #[error("unknown experiment id `{0}`")]
    UnknownExperiment(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, QbtError>;
