//! Plain-text rendering of ANOVA tables, DMRT groupings and regression fits.

use std::fmt::Write;

use super::{AnovaTable, DmrtGrouping, RegressionFit};

/// Below this a p-value is printed as `< 0.0001`.
pub const P_FLOOR: f64 = 1e-4;

pub fn format_p(p: f64) -> String {
    if p < P_FLOOR {
        "< 0.0001".to_string()
    } else {
        format!("{p:.4}")
    }
}

/// `*` when significant at 5%, `ns` otherwise.
pub fn significance_mark(p: f64) -> &'static str {
    if p < 0.05 {
        "*"
    } else {
        "ns"
    }
}

/// Fixed two-decimal formatting with thousands separators.
pub fn format_num(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{:.2}", x.abs());
    let (int, frac) = s.split_once('.').unwrap_or((&s, ""));
    let mut grouped = String::new();
    for (i, ch) in int.chars().enumerate() {
        if i > 0 && (int.len() - i) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    let sign = if x < 0.0 && s.chars().any(|c| c != '0' && c != '.') { "-" } else { "" };
    format!("{sign}{grouped}.{frac}")
}

pub fn render_anova(title: &str, table: &AnovaTable) -> String {
    let header = ["SOV", "DF", "Sum of Squares", "Mean Square", "F", "p"];
    let mut cells: Vec<[String; 6]> = vec![header.map(String::from)];
    for r in &table.rows {
        cells.push([
            r.source.clone(),
            r.df.to_string(),
            format_num(r.ss),
            r.ms.filter(|_| r.f.is_some()).map(format_num).unwrap_or_default(),
            r.f.map(format_num).unwrap_or_default(),
            r.p.map(format_p).unwrap_or_default(),
        ]);
    }
    // the error row keeps its mean square even though it has no F
    if let Some(i) = table.rows.iter().position(|r| r.source == super::anova::ERROR_ROW) {
        cells[i + 1][3] = table.rows[i].ms.map(format_num).unwrap_or_default();
    }
    let mut widths = [0usize; 6];
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    writeln!(out, "{title}").unwrap();
    for (k, row) in cells.iter().enumerate() {
        let mut line = String::new();
        for (j, c) in row.iter().enumerate() {
            if j == 0 {
                write!(line, "{c:<w$}", w = widths[0]).unwrap();
            } else {
                write!(line, "  {c:>w$}", w = widths[j]).unwrap();
            }
        }
        writeln!(out, "{}", line.trim_end()).unwrap();
        if k == 0 {
            writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 10)).unwrap();
        }
    }
    if table.degenerate {
        writeln!(out, "(error mean square is zero; F is unbounded)").unwrap();
    }
    out
}

/// Lists means in descending order with their letters. `uppercase` switches
/// the letter case so two groupings can be told apart side by side.
pub fn render_dmrt(title: &str, g: &DmrtGrouping, uppercase: bool) -> String {
    let lw = g.entries.iter().map(|e| e.label.chars().count()).max().unwrap_or(0).max(5);
    let mut out = String::new();
    writeln!(out, "{title}").unwrap();
    writeln!(
        out,
        "DMRT alpha = {}, n = {}, df_error = {}, MS_error = {}",
        g.alpha,
        g.n,
        g.df_error,
        format_num(g.ms_error)
    )
    .unwrap();
    for e in &g.entries {
        let letters = if uppercase { e.letters.to_uppercase() } else { e.letters.clone() };
        writeln!(out, "{:<lw$}  {:>10}  {}", e.label, format_num(e.mean), letters).unwrap();
    }
    out
}

/// `lhs = 4.58* x - 2.69ns, r2 = 0.97`
pub fn render_fit(lhs: &str, x_name: &str, fit: &RegressionFit) -> String {
    let sign = if fit.intercept < 0.0 { '-' } else { '+' };
    format!(
        "{lhs} = {:.2}{} {x_name} {sign} {:.2}{}, r2 = {:.2}",
        fit.slope,
        significance_mark(fit.slope_p),
        fit.intercept.abs(),
        significance_mark(fit.intercept_p),
        fit.r2
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{dmrt, linear_regression, one_way_anova};

    #[test]
    fn p_formatting() {
        assert_eq!(format_p(0.687313), "0.6873");
        assert_eq!(format_p(3.7e-6), "< 0.0001");
        assert_eq!(format_p(1e-4), "0.0001");
    }

    #[test]
    fn number_grouping() {
        assert_eq!(format_num(1633.05), "1,633.05");
        assert_eq!(format_num(37354.14), "37,354.14");
        assert_eq!(format_num(0.8), "0.80");
        assert_eq!(format_num(-2.69), "-2.69");
        assert_eq!(format_num(-0.001), "0.00");
        assert_eq!(format_num(1234567.0), "1,234,567.00");
    }

    #[test]
    fn anova_layout_contains_rows() {
        let t = one_way_anova(&[("x", vec![1.0, 2.0, 3.0]), ("y", vec![2.0, 3.0, 4.0]), ("z", vec![6.0, 7.0, 8.0])])
            .unwrap();
        let s = render_anova("Delay", &t);
        assert!(s.contains("Treatment"));
        assert!(s.contains("Error"));
        assert!(s.contains("Total"));
        assert!(s.contains("21.00"));
        assert!(s.contains("0.0020"));
    }

    #[test]
    fn dmrt_letters_case() {
        let g = dmrt(&[("t0", 10.0), ("t1", 50.0)], 10, 1.0, 18, 0.05).unwrap();
        assert!(render_dmrt("speed", &g, true).contains(" A"));
        assert!(render_dmrt("delay", &g, false).contains(" a"));
    }

    #[test]
    fn fit_equation() {
        let pts: Vec<(f64, f64)> = [0.0, 10.0, 50.0, 100.0].iter().map(|&x| (x, 4.58 * x - 2.69)).collect();
        let fit = linear_regression(&pts).unwrap();
        assert_eq!(render_fit("delay", "V+", &fit), "delay = 4.58* V+ - 2.69*, r2 = 1.00");
    }
}
