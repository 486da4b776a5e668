use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Input file or stream could not be read or parsed.
    #[error("input error: {0}")]
    Input(String),

    /// A specific row of the input failed to parse (1-based file line).
    #[error("input error at line {line}: {message}")]
    InputAt { line: usize, message: String },

    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Distribution parameters violate their constraints.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Too few observations for the requested estimator.
    #[error("insufficient data: need at least {needed} observations, have {have}")]
    InsufficientData { needed: usize, have: usize },

    /// All observations are identical; the likelihood is degenerate.
    #[error("degenerate data: all values are equal")]
    DegenerateData,

    /// The requested level falls below the modeled tail; the closed-form
    /// estimator does not apply there.
    #[error(
        "alpha {alpha} is below the modeled tail (requires alpha >= {min_alpha}); \
         use the empirical estimator for levels inside the body"
    )]
    OutOfTail { alpha: f64, min_alpha: f64 },

    /// The EL/UL/WC region decomposition is undefined for these inputs.
    #[error("decomposition undefined: {0}")]
    Decomposition(String),

    /// A refit required by a sensitivity analysis failed at one threshold.
    #[error("fit failed at threshold {threshold}: {source}")]
    FitAtThreshold {
        threshold: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
