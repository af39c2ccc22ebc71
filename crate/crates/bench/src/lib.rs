//! Configuration-driven experiments for `hmclab`: chain sampling with
//! per-chain diagnostics, the quadratic benchmark table, condition-number
//! scaling of the closed-form bounds, and integrator bias orders.

pub mod checks;
pub mod config;
pub mod experiments;
pub mod report;

pub use config::BenchConfig;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] hmclab::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    /// Process exit code: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            _ => 1,
        }
    }
}
