//! Duncan's multiple range test with letter groupings.

use serde::{Deserialize, Serialize};

use super::duncan_table::{DF_ROWS, DUNCAN_05, P_MAX, P_MIN};
use super::StatsError;

/// The only significance level the embedded table supports.
pub const DMRT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmrtEntry {
    pub label: String,
    pub mean: f64,
    /// Lowercase letters; means sharing a letter are not significantly different.
    pub letters: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmrtGrouping {
    /// Sorted by mean, descending.
    pub entries: Vec<DmrtEntry>,
    pub alpha: f64,
    pub df_error: u64,
    pub ms_error: f64,
    pub n: usize,
    /// `(p, R_p)` for every span used.
    pub critical_ranges: Vec<(usize, f64)>,
}

impl DmrtGrouping {
    pub fn letters_of(&self, label: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.label == label)
            .map(|e| e.letters.as_str())
    }

    /// True when the two labelled means share at least one letter.
    pub fn same_group(&self, a: &str, b: &str) -> bool {
        match (self.letters_of(a), self.letters_of(b)) {
            (Some(x), Some(y)) => x.chars().any(|c| y.contains(c)),
            _ => false,
        }
    }

    /// Number of distinct letters used.
    pub fn letter_count(&self) -> usize {
        let mut all: Vec<char> = self.entries.iter().flat_map(|e| e.letters.chars()).collect();
        all.sort_unstable();
        all.dedup();
        all.len()
    }
}

/// Duncan's significant studentized range `r_0.05(p, df)`.
///
/// Rows between tabulated degrees of freedom are interpolated linearly in `1/df`.
pub fn duncan_r(p: usize, df: u64) -> Result<f64, StatsError> {
    if !(P_MIN..=P_MAX).contains(&p) {
        return Err(StatsError::Unsupported(format!(
            "DMRT table covers spans {P_MIN}..={P_MAX}, got {p}"
        )));
    }
    if df == 0 {
        return Err(StatsError::Domain("DMRT needs df_error >= 1".into()));
    }
    let col = p - P_MIN;
    let d = df as f64;
    if let Some(row) = DF_ROWS.iter().position(|&r| r == d) {
        return Ok(DUNCAN_05[row][col]);
    }
    // df lies strictly between two tabulated rows (past 30)
    let hi = DF_ROWS.iter().position(|&r| r > d).unwrap_or(DF_ROWS.len() - 1);
    let lo = hi - 1;
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    let (x0, x1) = (inv(DF_ROWS[lo]), inv(DF_ROWS[hi]));
    let w = (1.0 / d - x1) / (x0 - x1);
    Ok(DUNCAN_05[hi][col] + w * (DUNCAN_05[lo][col] - DUNCAN_05[hi][col]))
}

/// Runs Duncan's test on group means that each rest on `n` observations.
///
/// A range of means that is not significant protects every sub-range inside
/// it, so letters always form contiguous runs over the sorted means.
pub fn dmrt<S: AsRef<str>>(
    means: &[(S, f64)],
    n: usize,
    ms_error: f64,
    df_error: u64,
    alpha: f64,
) -> Result<DmrtGrouping, StatsError> {
    if (alpha - DMRT_ALPHA).abs() > 1e-12 {
        return Err(StatsError::Unsupported(format!(
            "DMRT is tabulated for alpha = 0.05 only, got {alpha}"
        )));
    }
    if means.is_empty() {
        return Err(StatsError::InsufficientData("DMRT needs at least one mean".into()));
    }
    if means.len() > P_MAX {
        return Err(StatsError::Unsupported(format!(
            "DMRT table supports at most {P_MAX} means, got {}",
            means.len()
        )));
    }
    if n == 0 {
        return Err(StatsError::InsufficientData("DMRT needs n >= 1".into()));
    }
    if !(ms_error.is_finite() && ms_error >= 0.0) {
        return Err(StatsError::Domain(format!("MS_error must be finite and >= 0, got {ms_error}")));
    }
    if means.iter().any(|(_, m)| !m.is_finite()) {
        return Err(StatsError::Domain("DMRT means must be finite".into()));
    }

    let mut sorted: Vec<(String, f64)> = means
        .iter()
        .map(|(l, m)| (l.as_ref().to_string(), *m))
        .collect();
    // descending by mean; stable, so ties keep input order
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1));

    let k = sorted.len();
    let se = (ms_error / n as f64).sqrt();
    let mut critical_ranges = Vec::new();
    for p in P_MIN..=k.max(P_MIN) {
        if p <= k {
            critical_ranges.push((p, duncan_r(p, df_error)? * se));
        }
    }
    let range_for = |p: usize| critical_ranges[p - P_MIN].1;

    // For every start i, the farthest j whose span is not significant.
    let reach: Vec<usize> = (0..k)
        .map(|i| {
            (i + 1..k)
                .rev()
                .find(|&j| sorted[i].1 - sorted[j].1 < range_for(j - i + 1))
                .unwrap_or(i)
        })
        .collect();

    let mut letters = vec![String::new(); k];
    let mut covered_to: Option<usize> = None;
    let mut next_letter = 0u8;
    for i in 0..k {
        let end = reach[i];
        if covered_to.is_some_and(|c| end <= c) {
            continue;
        }
        let ch = (b'a' + next_letter) as char;
        next_letter += 1;
        for l in letters.iter_mut().take(end + 1).skip(i) {
            l.push(ch);
        }
        covered_to = Some(end);
    }

    Ok(DmrtGrouping {
        entries: sorted
            .into_iter()
            .zip(letters)
            .map(|((label, mean), letters)| DmrtEntry { label, mean, letters })
            .collect(),
        alpha,
        df_error,
        ms_error,
        n,
        critical_ranges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_spot_values() {
        // classic printed Duncan values
        assert!((duncan_r(2, 10).unwrap() - 3.151).abs() < 5e-4);
        assert!((duncan_r(3, 10).unwrap() - 3.293).abs() < 5e-4);
        assert!((duncan_r(2, u64::MAX).unwrap() - 2.772).abs() < 1e-3);
        assert!((duncan_r(5, 20).unwrap() - 3.255).abs() < 1e-3);
    }

    #[test]
    fn interpolation_in_reciprocal_df() {
        // df = 54 sits 2/9 of the way from 1/60 towards 1/40
        let r = duncan_r(2, 54).unwrap();
        assert!((r - (2.8288 + (2.0 / 9.0) * (2.8582 - 2.8288))).abs() < 1e-12);
        let r = duncan_r(2, 240).unwrap();
        assert!((r - (2.7718 + 0.5 * (2.8000 - 2.7718))).abs() < 1e-12);
    }

    #[test]
    fn equal_means_share_one_letter() {
        let means: Vec<(String, f64)> = (0..6).map(|i| (format!("t{i}"), 12.5)).collect();
        let g = dmrt(&means, 10, 23.42, 54, 0.05).unwrap();
        assert!(g.entries.iter().all(|e| e.letters == "a"));
    }

    #[test]
    fn far_apart_pair_gets_two_letters() {
        let se = (4.0f64 / 10.0).sqrt();
        let r2 = duncan_r(2, 54).unwrap() * se;
        let g = dmrt(&[("x", 0.0), ("y", 10.0 * r2)], 10, 4.0, 54, 0.05).unwrap();
        assert_eq!(g.letters_of("y"), Some("a"));
        assert_eq!(g.letters_of("x"), Some("b"));
    }

    #[test]
    fn hand_walked_six_means() {
        // n = 10, MS_E = 23.42, df = 54 -> SE = sqrt(2.342) = 1.53036
        // r(p, 54) by 1/df interpolation between the 40 and 60 rows:
        //   p=2 2.8353 -> R2 4.339   p=3 2.9824 -> R3 4.564
        //   p=4 3.0793 -> R4 4.712   p=5 3.1495 -> R5 4.820   p=6 3.2036 -> R6 4.903
        // sorted means 60.0 56.5 53.0 50.0 40.0 39.0
        //   60.0 vs 56.5: 3.5 < R2 ns;  vs 53.0: 7.0 >= R3 sig   -> span [1,2]
        //   56.5 vs 53.0: 3.5 < R2 ns;  vs 50.0: 6.5 >= R3 sig   -> span [2,3]
        //   53.0 vs 50.0: 3.0 < R2 ns;  vs 40.0: 13 >= R3 sig    -> span [3,4]
        //   50.0 vs 40.0: 10 >= R2 sig                            -> [4,4] inside [3,4]
        //   40.0 vs 39.0: 1.0 < R2 ns                             -> span [5,6]
        // letters: a, ab, bc, c, d, d
        let means = [
            ("t3", 53.0),
            ("t0", 60.0),
            ("t5", 39.0),
            ("t1", 56.5),
            ("t4", 40.0),
            ("t2", 50.0),
        ];
        let g = dmrt(&means, 10, 23.42, 54, 0.05).unwrap();
        let got: Vec<(&str, &str)> = g
            .entries
            .iter()
            .map(|e| (e.label.as_str(), e.letters.as_str()))
            .collect();
        assert_eq!(
            got,
            vec![("t0", "a"), ("t1", "ab"), ("t3", "bc"), ("t2", "c"), ("t4", "d"), ("t5", "d")]
        );
        assert!((g.critical_ranges[0].1 - 4.339).abs() < 1e-3);
    }

    #[test]
    fn non_significant_span_protects_inner_pairs() {
        // SE = 1, df = inf: R2 = 2.7718, R3 = 2.9184
        // 10 vs 7.2 alone would be significant (2.8 >= R2), but the whole
        // span 10..7.1 (2.9 < R3) is not, so all three share a letter.
        let g = dmrt(&[("a", 10.0), ("b", 7.2), ("c", 7.1)], 1, 1.0, u64::MAX, 0.05).unwrap();
        assert!(g.entries.iter().all(|e| e.letters == "a"));
    }

    #[test]
    fn rejects_unsupported_alpha_and_too_many_means() {
        assert!(dmrt(&[("a", 1.0), ("b", 2.0)], 5, 1.0, 8, 0.01).is_err());
        let many: Vec<(String, f64)> = (0..11).map(|i| (i.to_string(), i as f64)).collect();
        assert!(dmrt(&many, 5, 1.0, 40, 0.05).is_err());
    }

    proptest::proptest! {
        #[test]
        fn translation_leaves_letters_unchanged(
            means in proptest::collection::vec(0.0f64..100.0, 2..=10),
            shift in -1000.0f64..1000.0,
            ms in 0.5f64..50.0,
        ) {
            let a: Vec<(String, f64)> = means.iter().enumerate().map(|(i, m)| (format!("g{i}"), *m)).collect();
            let b: Vec<(String, f64)> = a.iter().map(|(l, m)| (l.clone(), m + shift)).collect();
            let ga = dmrt(&a, 10, ms, 54, 0.05).unwrap();
            let gb = dmrt(&b, 10, ms, 54, 0.05).unwrap();
            let la: Vec<_> = ga.entries.iter().map(|e| (&e.label, &e.letters)).collect();
            let lb: Vec<_> = gb.entries.iter().map(|e| (&e.label, &e.letters)).collect();
            proptest::prop_assert_eq!(la, lb);
        }

        #[test]
        fn letters_are_contiguous_runs(
            means in proptest::collection::vec(0.0f64..30.0, 1..=10),
        ) {
            let a: Vec<(String, f64)> = means.iter().enumerate().map(|(i, m)| (i.to_string(), *m)).collect();
            let g = dmrt(&a, 5, 4.0, 20, 0.05).unwrap();
            for ch in 'a'..='j' {
                let idx: Vec<usize> = g.entries.iter().enumerate()
                    .filter(|(_, e)| e.letters.contains(ch)).map(|(i, _)| i).collect();
                if let (Some(f), Some(l)) = (idx.first(), idx.last()) {
                    proptest::prop_assert_eq!(l - f + 1, idx.len());
                }
            }
            proptest::prop_assert!(g.entries.iter().all(|e| !e.letters.is_empty()));
        }
    }
}
