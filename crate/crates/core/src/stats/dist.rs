//! Upper-tail p-values for the F and Student t distributions.
//!
//! The two are computed along different routes on purpose: F goes through
//! the regularized incomplete beta function, t through the closed-form
//! finite series for integer degrees of freedom. `p_t(sqrt(F), d)` and
//! `p_F(F, 1, d)` must agree, which makes each a check on the other.

use super::special::reg_incomplete_beta;
use super::StatsError;

/// Above this many degrees of freedom the t series gets long; fall back to the beta route.
const T_SERIES_MAX_DF: u64 = 200_000;

/// Upper-tail probability `P(F(df1, df2) > f)`.
pub fn f_pvalue(f: f64, df1: u64, df2: u64) -> Result<f64, StatsError> {
    if df1 == 0 || df2 == 0 {
        return Err(StatsError::Domain(format!(
            "F distribution needs positive degrees of freedom, got ({df1}, {df2})"
        )));
    }
    if f.is_nan() || f < 0.0 {
        return Err(StatsError::Domain(format!("F statistic must be >= 0, got {f}")));
    }
    if f == 0.0 {
        return Ok(1.0);
    }
    if f.is_infinite() {
        return Ok(0.0);
    }
    let (d1, d2) = (df1 as f64, df2 as f64);
    let x = d2 / (d2 + d1 * f);
    reg_incomplete_beta(d2 / 2.0, d1 / 2.0, x)
}

/// Two-tailed p-value `P(|T(df)| > |t|)`.
pub fn t_pvalue(t: f64, df: u64) -> Result<f64, StatsError> {
    if df == 0 {
        return Err(StatsError::Domain("t distribution needs df >= 1".into()));
    }
    if t.is_nan() {
        return Err(StatsError::Domain("t statistic is NaN".into()));
    }
    let t = t.abs();
    if t == 0.0 {
        return Ok(1.0);
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    if df > T_SERIES_MAX_DF {
        let d = df as f64;
        return reg_incomplete_beta(d / 2.0, 0.5, d / (d + t * t));
    }
    Ok((1.0 - t_central_mass(t, df)).clamp(0.0, 1.0))
}

/// `A(t | df) = P(|T| <= t)` by the finite trigonometric series.
fn t_central_mass(t: f64, df: u64) -> f64 {
    let d = df as f64;
    let r = (d + t * t).sqrt();
    let sin = t / r;
    let cos = d.sqrt() / r;
    let cos2 = cos * cos;

    if df % 2 == 1 {
        let theta = t.atan2(d.sqrt());
        if df == 1 {
            return 2.0 * theta / std::f64::consts::PI;
        }
        // cos + (2/3)cos^3 + (2*4)/(3*5)cos^5 + ... up to cos^(df-2)
        let mut term = cos;
        let mut sum = term;
        let mut k = 1u64;
        while 2 * k + 1 < df {
            term *= cos2 * (2 * k) as f64 / (2 * k + 1) as f64;
            sum += term;
            if term < sum * 1e-18 {
                break;
            }
            k += 1;
        }
        2.0 / std::f64::consts::PI * (theta + sin * sum)
    } else {
        // 1 + (1/2)cos^2 + (1*3)/(2*4)cos^4 + ... up to cos^(df-2)
        let mut term = 1.0;
        let mut sum = term;
        let mut k = 1u64;
        while 2 * k < df {
            term *= cos2 * (2 * k - 1) as f64 / (2 * k) as f64;
            sum += term;
            if term < sum * 1e-18 {
                break;
            }
            k += 1;
        }
        sin * sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_boundaries() {
        assert_eq!(f_pvalue(0.0, 3, 7).unwrap(), 1.0);
        assert_eq!(f_pvalue(f64::INFINITY, 3, 7).unwrap(), 0.0);
        assert!(f_pvalue(-1.0, 1, 1).is_err());
        assert!(f_pvalue(1.0, 0, 1).is_err());
    }

    #[test]
    fn f_two_two_closed_form() {
        // F(2, 2): P(F > f) = 1 / (1 + f)
        for &f in &[0.1, 1.0, 3.0, 17.5] {
            assert!((f_pvalue(f, 2, 2).unwrap() - 1.0 / (1.0 + f)).abs() < 1e-14);
        }
    }

    #[test]
    fn t_cauchy_and_two_df_closed_forms() {
        // df = 1 is Cauchy: p = 1 - 2 atan(t)/pi
        for &t in &[0.3, 1.0, 12.0] {
            let want = 1.0 - 2.0 * f64::atan(t) / std::f64::consts::PI;
            assert!((t_pvalue(t, 1).unwrap() - want).abs() < 1e-15);
        }
        // df = 2: p = 1 - t / sqrt(2 + t^2)
        for &t in &[0.3f64, 1.0, 12.0] {
            let want = 1.0 - t / (2.0 + t * t).sqrt();
            assert!((t_pvalue(t, 2).unwrap() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn t_limits() {
        assert_eq!(t_pvalue(0.0, 9).unwrap(), 1.0);
        assert!(t_pvalue(100.0, 9).unwrap() < 1e-12);
        assert_eq!(t_pvalue(-2.0, 9).unwrap(), t_pvalue(2.0, 9).unwrap());
    }

    #[test]
    fn t_textbook_critical_values() {
        // two-tailed 5% critical values from standard t tables
        for &(df, crit) in &[(5u64, 2.570_582), (10, 2.228_139), (30, 2.042_272), (54, 2.004_879)] {
            assert!((t_pvalue(crit, df).unwrap() - 0.05).abs() < 2e-6, "df={df}");
        }
    }

    #[test]
    fn large_df_fallback_agrees_with_series() {
        let a = t_pvalue(1.7, T_SERIES_MAX_DF).unwrap();
        let b = t_pvalue(1.7, T_SERIES_MAX_DF + 1).unwrap();
        assert!((a - b).abs() < 1e-8);
    }

    proptest::proptest! {
        #[test]
        fn f_and_t_routes_agree(f in 0.0f64..200.0, d in 1u64..500) {
            let pf = f_pvalue(f, 1, d).unwrap();
            let pt = t_pvalue(f.sqrt(), d).unwrap();
            proptest::prop_assert!((pf - pt).abs() < 1e-10, "F={f} d={d}: {pf} vs {pt}");
        }

        #[test]
        fn f_pvalue_decreases_in_f(f in 0.01f64..50.0, df1 in 1u64..20, df2 in 1u64..80) {
            let a = f_pvalue(f, df1, df2).unwrap();
            let b = f_pvalue(f * 1.1, df1, df2).unwrap();
            proptest::prop_assert!(b < a || (a < 1e-300 && b <= a));
        }
    }
}
