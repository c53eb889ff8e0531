use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Core(#[from] partreg_core::Error),

    #[error("configuration: {0}")]
    Config(String),

    #[error("infeasible design: acceptance rate {rate:.3e} below 1e-3 after {raw} raw draws")]
    Infeasible { rate: f64, raw: u64 },
}

pub type SimResult<T> = Result<T, SimError>;
