//! Scheme comparison: ANOVA, Duncan groupings and the best-scheme rule.

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::metrics::ReplicationResult;
use crate::schemes::SchemeId;
use crate::stats::{dmrt, one_way_anova, AnovaTable, DmrtGrouping, DMRT_ALPHA};

/// How the best scheme was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BestRule {
    /// Exactly one scheme is in both the lowest-delay and highest-speed groups.
    UniqueIntersection,
    /// Several schemes are in both groups; the lowest mean delay wins.
    TieBrokenByDelay,
    /// No scheme is in both groups; the lowest mean delay wins.
    DisjointGroupsFallback,
}

impl BestRule {
    pub fn describe(self) -> &'static str {
        match self {
            BestRule::UniqueIntersection => "the only scheme in both the lowest-delay and the highest-speed Duncan groups",
            BestRule::TieBrokenByDelay => "several schemes share both top Duncan groups; lowest mean delay breaks the tie",
            BestRule::DisjointGroupsFallback => "no scheme is in both top Duncan groups; lowest mean delay chosen",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestScheme {
    pub scheme: SchemeId,
    pub rule: BestRule,
    /// Schemes in both top groups.
    pub candidates: Vec<SchemeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeMeans {
    pub scheme: SchemeId,
    pub delta: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub n: usize,
    pub means: Vec<SchemeMeans>,
    pub anova_delta: AnovaTable,
    pub anova_sigma: AnovaTable,
    pub dmrt_delta: DmrtGrouping,
    pub dmrt_sigma: DmrtGrouping,
    pub best: BestScheme,
}

impl Comparison {
    pub fn delta_p(&self) -> f64 {
        self.anova_delta.effect().p.unwrap_or(1.0)
    }

    pub fn sigma_p(&self) -> f64 {
        self.anova_sigma.effect().p.unwrap_or(1.0)
    }

    /// Standard error of a scheme mean, `sqrt(MS_error / n)`.
    pub fn stderr_delta(&self) -> f64 {
        (self.anova_delta.ms_error() / self.n as f64).sqrt()
    }

    pub fn stderr_sigma(&self) -> f64 {
        (self.anova_sigma.ms_error() / self.n as f64).sqrt()
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

pub fn compare_schemes(results: &[(SchemeId, Vec<ReplicationResult>)]) -> Result<Comparison, HarnessError> {
    if results.len() < 2 {
        return Err(HarnessError::Insufficient("comparison needs at least 2 schemes".into()));
    }
    let n = results[0].1.len();
    if let Some((s, r)) = results.iter().find(|(_, r)| r.len() != n) {
        return Err(HarnessError::Insufficient(format!("scheme {s} has {} replications, expected {n}", r.len())));
    }
    if n < 2 {
        return Err(HarnessError::Insufficient(format!("{n} replication(s) per scheme is insufficient for ANOVA")));
    }
    let label = |s: SchemeId| s.as_str().to_string();
    let groups = |f: fn(&ReplicationResult) -> f64| -> Vec<(String, Vec<f64>)> {
        results.iter().map(|(s, r)| (label(*s), r.iter().map(f).collect())).collect()
    };
    let anova_delta = one_way_anova(&groups(|r| r.delta))?;
    let anova_sigma = one_way_anova(&groups(|r| r.sigma))?;
    let means: Vec<SchemeMeans> = results
        .iter()
        .map(|(s, r)| SchemeMeans {
            scheme: *s,
            delta: mean(r.iter().map(|x| x.delta)),
            sigma: mean(r.iter().map(|x| x.sigma)),
        })
        .collect();
    let grouping = |t: &AnovaTable, f: fn(&SchemeMeans) -> f64| {
        let m: Vec<(String, f64)> = means.iter().map(|m| (label(m.scheme), f(m))).collect();
        dmrt(&m, n, t.ms_error(), t.error().df, DMRT_ALPHA)
    };
    let dmrt_delta = grouping(&anova_delta, |m| m.delta)?;
    let dmrt_sigma = grouping(&anova_sigma, |m| m.sigma)?;
    let best = best_scheme(&means, &dmrt_delta, &dmrt_sigma);
    Ok(Comparison { n, means, anova_delta, anova_sigma, dmrt_delta, dmrt_sigma, best })
}

/// Intersects the group holding the lowest mean delay with the group
/// holding the highest mean speed.
pub fn best_scheme(means: &[SchemeMeans], dmrt_delta: &DmrtGrouping, dmrt_sigma: &DmrtGrouping) -> BestScheme {
    let by_delta = |a: &&SchemeMeans, b: &&SchemeMeans| a.delta.total_cmp(&b.delta).then(a.scheme.cmp(&b.scheme));
    let lowest = means.iter().min_by(by_delta).expect("at least one scheme");
    let fastest = means
        .iter()
        .max_by(|a, b| a.sigma.total_cmp(&b.sigma).then(b.scheme.cmp(&a.scheme)))
        .expect("at least one scheme");
    let mut candidates: Vec<&SchemeMeans> = means
        .iter()
        .filter(|m| {
            dmrt_delta.same_group(m.scheme.as_str(), lowest.scheme.as_str())
                && dmrt_sigma.same_group(m.scheme.as_str(), fastest.scheme.as_str())
        })
        .collect();
    candidates.sort_by(by_delta);
    let ids = candidates.iter().map(|m| m.scheme).collect();
    match candidates.len() {
        0 => BestScheme { scheme: lowest.scheme, rule: BestRule::DisjointGroupsFallback, candidates: ids },
        1 => BestScheme { scheme: candidates[0].scheme, rule: BestRule::UniqueIntersection, candidates: ids },
        _ => BestScheme { scheme: candidates[0].scheme, rule: BestRule::TieBrokenByDelay, candidates: ids },
    }
}
