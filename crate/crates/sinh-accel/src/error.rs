use thiserror::Error;

/// Errors raised by contour construction and evaluation.
#[derive(Debug, Error)]
pub enum SinhError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A complex power or logarithm would be taken on the principal-branch cut.
    #[error("branch cut violation: {0}")]
    BranchCut(String),

    /// The effective strip of analyticity is empty (e.g. a call with mu_- >= -1).
    #[error("empty strip: {0}")]
    EmptyStrip(String),

    #[error("empty cone: {0}")]
    EmptyCone(String),

    /// Integrand evaluation at the strip edge was non-finite.
    #[error("degenerate contour: {0}")]
    DegenerateContour(String),

    /// A trapezoid term came out non-finite; `j` is the offending node index.
    #[error("non-finite term at j={j}: {detail}")]
    NonFiniteTerm { j: i64, detail: String },

    /// The result violates a bound by more than the tolerance allows.
    #[error("accuracy alarm: {0}")]
    AccuracyAlarm(String),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("config error: {0}")]
    Config(String),
}

impl SinhError {
    /// Exit status class for the CLI: 2 = config, 3 = domain, 4 = accuracy.
    pub fn exit_code(&self) -> i32 {
        match self {
            SinhError::Config(_) | SinhError::InvalidParameter(_) => 2,
            SinhError::AccuracyAlarm(_) => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, SinhError>;
