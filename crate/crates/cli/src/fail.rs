//! Error classes mapped onto the process exit codes: 2 configuration,
//! 3 data, 4 estimation infeasible, 5 validation tolerance failure.

use partreg_core::Error as CoreError;
use partreg_sim::SimError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("estimation infeasible: {0}")]
    Estimation(String),

    #[error("validation failed: {0}")]
    Tolerance(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Estimation(_) => 4,
            CliError::Tolerance(_) => 5,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NonpositiveBandwidth(_)
            | CoreError::BandwidthExponent(_)
            | CoreError::EmptyGrid
            | CoreError::InvalidArgument(_) => CliError::Config(e.to_string()),
            CoreError::EmptyData
            | CoreError::Degenerate(_)
            | CoreError::SamplingCondition { .. }
            | CoreError::NoSampledRows => CliError::Data(e.to_string()),
            CoreError::EmptyWindow { .. }
            | CoreError::OutsideWindow { .. }
            | CoreError::NotEstimable { .. }
            | CoreError::PartialSupport { .. } => CliError::Estimation(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Core(c) => c.into(),
            SimError::Config(m) => CliError::Config(m),
            SimError::Infeasible { .. } => CliError::Estimation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(format!("io: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Data(format!("csv: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
