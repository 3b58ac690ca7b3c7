use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("E-vectors live on different support sets")]
    SupportMismatch,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported feature: {0}")]
    UnsupportedFeature(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("E-DNN separation requires a nonnegative instance")]
    ModeViolation,

    #[error("blend weight {0} is outside (0, 1)")]
    InvalidAlpha(f64),

    #[error("degenerate gap: SDP bound {z_sdp} does not exceed McCormick bound {z_mcc}")]
    DegenerateGap { z_mcc: f64, z_sdp: f64 },

    #[error("solver failure ({status}): {detail}")]
    Solver { status: String, detail: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Whether the failure came from a solver rather than from the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Solver { .. })
    }
}
