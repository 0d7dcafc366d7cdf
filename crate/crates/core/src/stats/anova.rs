//! One-way and randomized-complete-block analysis of variance.

use serde::{Deserialize, Serialize};

use super::dist::f_pvalue;
use super::StatsError;

/// One line of an ANOVA table. The total row carries no mean square, F or p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaRow {
    pub source: String,
    pub df: u64,
    pub ss: f64,
    pub ms: Option<f64>,
    pub f: Option<f64>,
    pub p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaTable {
    /// Effect rows, then `Error`, then `Total`.
    pub rows: Vec<AnovaRow>,
    /// Set when the error mean square is zero while an effect is not, so F is infinite.
    pub degenerate: bool,
}

pub const ERROR_ROW: &str = "Error";
pub const TOTAL_ROW: &str = "Total";

impl AnovaTable {
    /// Assembles a table from effect sums of squares and the error term.
    pub fn from_components(
        effects: &[(&str, f64, u64)],
        error_ss: f64,
        error_df: u64,
    ) -> Result<Self, StatsError> {
        if error_df == 0 {
            return Err(StatsError::InsufficientData("error term has zero degrees of freedom".into()));
        }
        let ms_error = error_ss / error_df as f64;
        let mut degenerate = false;
        let mut rows = Vec::with_capacity(effects.len() + 2);
        let mut total_ss = error_ss;
        let mut total_df = error_df;
        for &(name, ss, df) in effects {
            if df == 0 {
                return Err(StatsError::InsufficientData(format!("{name} has zero degrees of freedom")));
            }
            let ms = ss / df as f64;
            let (f, p) = if ms <= 0.0 {
                (0.0, 1.0)
            } else if ms_error <= 0.0 {
                degenerate = true;
                (f64::INFINITY, 0.0)
            } else {
                let f = ms / ms_error;
                (f, f_pvalue(f, df, error_df)?)
            };
            total_ss += ss;
            total_df += df;
            rows.push(AnovaRow {
                source: name.to_string(),
                df,
                ss,
                ms: Some(ms),
                f: Some(f),
                p: Some(p),
            });
        }
        rows.push(AnovaRow {
            source: ERROR_ROW.into(),
            df: error_df,
            ss: error_ss,
            ms: Some(ms_error),
            f: None,
            p: None,
        });
        rows.push(AnovaRow {
            source: TOTAL_ROW.into(),
            df: total_df,
            ss: total_ss,
            ms: None,
            f: None,
            p: None,
        });
        Ok(Self { rows, degenerate })
    }

    pub fn row(&self, source: &str) -> Option<&AnovaRow> {
        self.rows.iter().find(|r| r.source == source)
    }

    /// The first effect row (treatment for one-way tables).
    pub fn effect(&self) -> &AnovaRow {
        &self.rows[0]
    }

    pub fn error(&self) -> &AnovaRow {
        &self.rows[self.rows.len() - 2]
    }

    pub fn total(&self) -> &AnovaRow {
        &self.rows[self.rows.len() - 1]
    }

    pub fn ms_error(&self) -> f64 {
        self.error().ms.unwrap_or(0.0)
    }

    pub fn relabel(mut self, from: &str, to: &str) -> Self {
        for r in &mut self.rows {
            if r.source == from {
                r.source = to.to_string();
            }
        }
        self
    }
}

fn check_finite(values: impl IntoIterator<Item = f64>) -> Result<(), StatsError> {
    for v in values {
        if !v.is_finite() {
            return Err(StatsError::Domain(format!("non-finite observation {v}")));
        }
    }
    Ok(())
}

pub const TREATMENT_ROW: &str = "Treatment";
pub const BLOCK_ROW: &str = "Block";

/// One-way ANOVA over labelled groups (group sizes may differ).
pub fn one_way_anova<S: AsRef<str>>(groups: &[(S, Vec<f64>)]) -> Result<AnovaTable, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::InsufficientData("one-way ANOVA needs at least 2 groups".into()));
    }
    for (label, values) in groups {
        if values.len() < 2 {
            return Err(StatsError::InsufficientData(format!(
                "group {} has {} value(s), need at least 2",
                label.as_ref(),
                values.len()
            )));
        }
        check_finite(values.iter().copied())?;
    }
    let n_total: usize = groups.iter().map(|(_, v)| v.len()).sum();
    let grand = groups.iter().flat_map(|(_, v)| v.iter()).sum::<f64>() / n_total as f64;

    let mut ss_treat = 0.0;
    let mut ss_error = 0.0;
    for (_, values) in groups {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        ss_treat += values.len() as f64 * (mean - grand).powi(2);
        ss_error += values.iter().map(|y| (y - mean).powi(2)).sum::<f64>();
    }
    let k = groups.len() as u64;
    AnovaTable::from_components(
        &[(TREATMENT_ROW, ss_treat, k - 1)],
        ss_error,
        n_total as u64 - k,
    )
}

/// Randomized complete block ANOVA on a blocks x treatments matrix.
pub fn rcbd_anova(data: &[Vec<f64>]) -> Result<AnovaTable, StatsError> {
    let b = data.len();
    if b < 2 {
        return Err(StatsError::InsufficientData("RCBD needs at least 2 blocks".into()));
    }
    let t = data[0].len();
    if t < 2 {
        return Err(StatsError::InsufficientData("RCBD needs at least 2 treatments".into()));
    }
    for (i, row) in data.iter().enumerate() {
        if row.len() != t {
            return Err(StatsError::Ragged(format!(
                "block {} has {} treatments, expected {t}",
                i + 1,
                row.len()
            )));
        }
        check_finite(row.iter().copied())?;
    }
    let n = (b * t) as f64;
    let grand = data.iter().flatten().sum::<f64>() / n;
    let block_means: Vec<f64> = data.iter().map(|r| r.iter().sum::<f64>() / t as f64).collect();
    let treat_means: Vec<f64> = (0..t)
        .map(|j| data.iter().map(|r| r[j]).sum::<f64>() / b as f64)
        .collect();

    let ss_block = t as f64 * block_means.iter().map(|m| (m - grand).powi(2)).sum::<f64>();
    let ss_treat = b as f64 * treat_means.iter().map(|m| (m - grand).powi(2)).sum::<f64>();
    let mut ss_error = 0.0;
    for (i, row) in data.iter().enumerate() {
        for (j, y) in row.iter().enumerate() {
            ss_error += (y - block_means[i] - treat_means[j] + grand).powi(2);
        }
    }
    let (b, t) = (b as u64, t as u64);
    AnovaTable::from_components(
        &[(BLOCK_ROW, ss_block, b - 1), (TREATMENT_ROW, ss_treat, t - 1)],
        ss_error,
        (b - 1) * (t - 1),
    )
}
