//! Volume sweeps and linear fits over the volume increase.

use serde::{Deserialize, Serialize};

use super::config::Scenario;
use super::run::run_grid;
use super::HarnessError;
use crate::metrics::ReplicationResult;
use crate::schemes::SchemeId;
use crate::stats::{linear_regression, RegressionFit};

pub const DEFAULT_LEVELS: [f64; 4] = [0.0, 0.10, 0.50, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub vplus: f64,
    pub mean_delta: f64,
    pub stderr_delta: f64,
    pub mean_sigma: f64,
    pub stderr_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeSweep {
    pub scheme: SchemeId,
    pub levels: Vec<LevelSummary>,
    /// Delay against the volume increase in percent.
    pub fit_delta: RegressionFit,
    pub fit_sigma: RegressionFit,
    pub results: Vec<ReplicationResult>,
}

impl SchemeSweep {
    pub fn delta_nondecreasing(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].mean_delta >= w[0].mean_delta)
    }

    pub fn sigma_nonincreasing(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].mean_sigma <= w[0].mean_sigma)
    }
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Summarises and fits one scheme's results; `results` hold every
/// replication at every level.
pub fn fit_sweep(scheme: SchemeId, levels: &[f64], results: Vec<ReplicationResult>) -> Result<SchemeSweep, HarnessError> {
    if levels.len() < 2 {
        return Err(HarnessError::Insufficient(format!("a sweep needs at least 2 volume levels, got {}", levels.len())));
    }
    let at = |v: f64, f: fn(&ReplicationResult) -> f64| -> Vec<f64> {
        results.iter().filter(|r| r.vplus == v).map(f).collect()
    };
    let mut summary = Vec::new();
    for &v in levels {
        let (mean_delta, stderr_delta) = mean_se(&at(v, |r| r.delta));
        let (mean_sigma, stderr_sigma) = mean_se(&at(v, |r| r.sigma));
        summary.push(LevelSummary { vplus: v, mean_delta, stderr_delta, mean_sigma, stderr_sigma });
    }
    let pts = |f: fn(&ReplicationResult) -> f64| -> Vec<(f64, f64)> { results.iter().map(|r| (r.vplus * 100.0, f(r))).collect() };
    let fit_delta = linear_regression(&pts(|r| r.delta))?;
    let fit_sigma = linear_regression(&pts(|r| r.sigma))?;
    Ok(SchemeSweep { scheme, levels: summary, fit_delta, fit_sigma, results })
}

pub fn volume_sweep(sc: &Scenario, schemes: &[SchemeId], levels: &[f64]) -> Result<Vec<SchemeSweep>, HarnessError> {
    if levels.len() < 2 {
        return Err(HarnessError::Insufficient(format!("a sweep needs at least 2 volume levels, got {}", levels.len())));
    }
    if let Some(v) = levels.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(HarnessError::Config(format!("volume level {v} must be >= 0")));
    }
    let cells: Vec<(SchemeId, f64)> = schemes.iter().flat_map(|&s| levels.iter().map(move |&v| (s, v))).collect();
    let mut grid = run_grid(sc, &cells)?.into_iter();
    schemes
        .iter()
        .map(|&s| {
            let results: Vec<ReplicationResult> = grid.by_ref().take(levels.len()).flatten().collect();
            fit_sweep(s, levels, results)
        })
        .collect()
}
