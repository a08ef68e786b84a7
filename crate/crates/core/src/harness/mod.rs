//! Campaigns: configs, analytic norm tables, sweeps, estimation runs, named
//! presets and the validation suite.

mod config;
mod estimate;
mod generators;
mod norm;
pub mod presets;
mod sweep;
pub mod validate;

pub use config::{
    Campaign, CampaignConfig, CoveringConfig, FamilyConfig, NamedProtocol, OutputConfig,
    OutputFormat, ProtocolConfig, StateConfig,
};
pub use estimate::{cmd_estimate, EstimateOptions, EstimateReport};
pub use generators::{all_sequences, OperatorConfig};
pub use norm::{budget_summary, cmd_norm, BudgetSummary, NormReport, NormRow, ProtocolBudget, ReferenceBudget};
pub use sweep::{cmd_sweep, write_sweep_csv, write_sweep_json, Empirical, SweepAxis, SweepOptions, SweepRow};

use crate::channels::ChannelError;
use crate::estimation::EstimationError;
use crate::operators::OperatorError;
use crate::simulator::SimError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("validation failed: {0}")]
    Validation(String),
}

impl HarnessError {
    /// Process exit code: 2 for bad input, 3 for runtime failures, 4 for
    /// failed validation checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Operator(_) | HarnessError::Channel(_) => 2,
            HarnessError::Sim(SimError::UnknownPreset(_)) => 2,
            HarnessError::Validation(_) => 4,
            _ => 3,
        }
    }
}
