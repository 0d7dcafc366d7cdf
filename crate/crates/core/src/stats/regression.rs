//! Ordinary least squares for a single predictor.

use serde::{Deserialize, Serialize};

use super::dist::t_pvalue;
use super::StatsError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
    /// Two-tailed p-value for slope = 0.
    pub slope_p: f64,
    /// Two-tailed p-value for intercept = 0.
    pub intercept_p: f64,
    pub df_resid: u64,
    pub n: usize,
}

impl RegressionFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

fn coef_pvalue(coef: f64, se: f64, df: u64) -> Result<f64, StatsError> {
    if se > 0.0 {
        t_pvalue(coef / se, df)
    } else if coef == 0.0 {
        Ok(1.0)
    } else {
        // exact fit: any nonzero coefficient is infinitely many standard errors out
        Ok(0.0)
    }
}

/// Fits `y = intercept + slope * x`.
pub fn linear_regression(points: &[(f64, f64)]) -> Result<RegressionFit, StatsError> {
    let n = points.len();
    if n < 3 {
        return Err(StatsError::InsufficientData(format!(
            "regression needs at least 3 points, got {n}"
        )));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(StatsError::Domain("regression points must be finite".into()));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(StatsError::Domain("all x values are identical".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points
        .iter()
        .map(|&(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let df = (n - 2) as u64;
    let s2 = sse / df as f64;
    let slope_se = (s2 / sxx).sqrt();
    let intercept_se = (s2 * (1.0 / nf + mx * mx / sxx)).sqrt();
    // constant y is explained perfectly by a flat line
    let r2 = if syy == 0.0 { 1.0 } else { (1.0 - sse / syy).clamp(0.0, 1.0) };
    Ok(RegressionFit {
        slope,
        intercept,
        r2,
        slope_se,
        intercept_se,
        slope_p: coef_pvalue(slope, slope_se, df)?,
        intercept_p: coef_pvalue(intercept, intercept_se, df)?,
        df_resid: df,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 2.0 * i as f64 + 1.0)).collect();
        let fit = linear_regression(&pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
        assert!(fit.slope_p < 1e-10);
    }

    #[test]
    fn normal_equations_oracle() {
        // solve [n Σx; Σx Σx²][a b]' = [Σy Σxy]' directly by Cramer's rule
        let pts = [(0.0, 22.3), (10.0, 26.1), (50.0, 45.9), (100.0, 69.8), (0.0, 21.0), (50.0, 44.2)];
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let det = n * sxx - sx * sx;
        let a = (sy * sxx - sx * sxy) / det;
        let b = (n * sxy - sx * sy) / det;
        let fit = linear_regression(&pts).unwrap();
        assert!((fit.intercept - a).abs() < 1e-9);
        assert!((fit.slope - b).abs() < 1e-9);
        assert!(fit.r2 > 0.0 && fit.r2 < 1.0);
        assert_eq!(fit.df_resid, 4);
    }

    #[test]
    fn standard_errors_by_hand() {
        // x = 1,2,3,4 ; y = 1,3,2,4 -> slope 0.8, intercept 0.5, SSE 1.8
        let fit = linear_regression(&[(1.0, 1.0), (2.0, 3.0), (3.0, 2.0), (4.0, 4.0)]).unwrap();
        assert!((fit.slope - 0.8).abs() < 1e-12);
        assert!((fit.intercept - 0.5).abs() < 1e-12);
        // s² = 0.9, Sxx = 5
        assert!((fit.slope_se - (0.9f64 / 5.0).sqrt()).abs() < 1e-12);
        assert!((fit.intercept_se - (0.9f64 * (0.25 + 6.25 / 5.0)).sqrt()).abs() < 1e-12);
        assert!((fit.r2 - (1.0 - 1.8 / 5.0)).abs() < 1e-12);
    }

    #[test]
    fn residuals_orthogonal() {
        let pts = [(1.0, 2.5), (2.0, 2.9), (4.0, 7.7), (7.0, 8.1), (9.0, 13.0)];
        let fit = linear_regression(&pts).unwrap();
        let r: Vec<f64> = pts.iter().map(|&(x, y)| y - fit.predict(x)).collect();
        assert!(r.iter().sum::<f64>().abs() < 1e-9);
        assert!(pts.iter().zip(&r).map(|(p, e)| p.0 * e).sum::<f64>().abs() < 1e-9);
    }

    #[test]
    fn rejects_degenerate_x_and_short_input() {
        assert!(linear_regression(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]).is_err());
        assert!(linear_regression(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
    }
}
