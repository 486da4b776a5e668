//! Command-line peaks-over-threshold analysis.
//!
//! Four subcommands: `analyze` (fit the tail and report VaR/ES), `diagnose`
//! (threshold-selection curves and band sensitivity), `simulate`
//! (deterministic test-data generation), and `backtest` (out-of-sample
//! exceedance calibration). Reports are versioned JSON; plot data is plain
//! CSV with a header row, optionally rendered to standalone SVG.
//!
//! Process exit codes: 0 success, 2 input error, 3 fit failure or
//! insufficient exceedances, 4 configuration contradiction.

pub mod args;
pub mod backtest;
pub mod config;
pub mod diagnose;
pub mod pipeline;
pub mod plotdata;
pub mod report;
pub mod sim;
pub mod svg;

/// Exit code for unreadable or malformed input data.
pub const EXIT_INPUT: u8 = 2;
/// Exit code for fit failures: non-convergence, insufficient exceedances,
/// degenerate data, or estimators outside the modeled tail.
pub const EXIT_FIT: u8 = 3;
/// Exit code for contradictory or out-of-domain configuration.
pub const EXIT_CONFIG: u8 = 4;

/// A failed run: the message goes to stderr, the code to the process exit.
#[derive(Debug)]
pub struct CliFailure {
    pub exit_code: u8,
    pub message: String,
}

impl CliFailure {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            exit_code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    pub fn fit(message: impl Into<String>) -> Self {
        Self {
            exit_code: EXIT_FIT,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self {
            exit_code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<evt_core::Error> for CliFailure {
    fn from(err: evt_core::Error) -> Self {
        use evt_core::Error as E;
        let exit_code = match &err {
            E::Input(_) | E::InputAt { .. } => EXIT_INPUT,
            E::InsufficientData { .. }
            | E::DegenerateData
            | E::OutOfTail { .. }
            | E::FitAtThreshold { .. } => EXIT_FIT,
            E::Domain(_) | E::InvalidParameter(_) | E::Decomposition(_) => EXIT_CONFIG,
        };
        Self {
            exit_code,
            message: err.to_string(),
        }
    }
}
