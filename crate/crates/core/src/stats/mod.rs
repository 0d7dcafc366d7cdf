//! Designed-experiment statistics: ANOVA, Duncan's multiple range test and
//! simple linear regression, with the distribution functions behind them.

pub mod anova;
pub mod dist;
pub mod dmrt;
pub mod duncan_table;
pub mod input;
pub mod regression;
pub mod render;
pub mod special;

pub use anova::{one_way_anova, rcbd_anova, AnovaRow, AnovaTable};
pub use dist::{f_pvalue, t_pvalue};
pub use dmrt::{dmrt, duncan_r, DmrtEntry, DmrtGrouping, DMRT_ALPHA};
pub use regression::{linear_regression, RegressionFit};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("did not converge: {0}")]
    NoConvergence(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("ragged input: {0}")]
    Ragged(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("input line {line}: {msg}")]
    Input { line: u64, msg: String },
}
