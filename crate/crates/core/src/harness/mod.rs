//! Experiment orchestration: configs, replications, comparisons, sweeps,
//! validation and reports.

pub mod commands;
pub mod compare;
pub mod config;
pub mod report;
pub mod run;
pub mod sweep;
pub mod validate;

pub use compare::{best_scheme, compare_schemes, BestRule, BestScheme, Comparison, SchemeMeans};
pub use config::{Scenario, ScenarioConfig, DEFAULT_BASE_SEED};
pub use report::{export_report, export_trips, read_results_csv, ExperimentReport, Provenance, RESULTS_HEADER};
pub use run::{run_grid, run_replication, run_replications, run_replications_full, run_set, ReplicationOutput};
pub use sweep::{fit_sweep, volume_sweep, SchemeSweep, DEFAULT_LEVELS};
pub use validate::{observed_samples, validate_against_observed, ObservedSample, Validation};

use crate::demand::DemandError;
use crate::kernel::KernelError;
use crate::metrics::MetricsError;
use crate::schemes::SchemeId;
use crate::stats::StatsError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error(transparent)]
    Demand(#[from] DemandError),
    #[error("simulation aborted (scheme {scheme}, V+ {vplus}, replicate {replicate}, seed {seed}): {error}")]
    Simulation { scheme: SchemeId, vplus: f64, replicate: usize, seed: u64, error: KernelError },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("{0}")]
    Insufficient(String),
}

impl HarnessError {
    /// Process exit status for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Demand(_) => 2,
            HarnessError::Simulation { .. } => 3,
            _ => 1,
        }
    }
}
