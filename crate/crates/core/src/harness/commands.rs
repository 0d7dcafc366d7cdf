//! The command-line workflows, callable without a process boundary.

use std::fs;
use std::path::Path;

use super::compare::compare_schemes;
use super::config::Scenario;
use super::report::{export_report, export_trips, ExperimentReport, Provenance};
use super::run::{run_grid, run_replications_full};
use super::sweep::volume_sweep;
use super::validate::{observed_samples, validate_against_observed};
use super::HarnessError;
use crate::demand::ingest_observations;
use crate::metrics::ReplicationResult;
use crate::schemes::SchemeId;
use crate::stats::input::{read_blocks, read_groups, read_points};
use crate::stats::render::{render_anova, render_dmrt, render_fit};
use crate::stats::{dmrt, linear_regression, one_way_anova, rcbd_anova, DMRT_ALPHA};

/// Overrides applied on top of a loaded config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scheme: Option<SchemeId>,
    pub base_seed: Option<u64>,
    pub replications: Option<usize>,
}

pub fn load(config: &Path, o: &Overrides) -> Result<Scenario, HarnessError> {
    let mut sc = Scenario::load(config).map_err(|e| match e {
        HarnessError::Io { path, msg } => HarnessError::Config(format!("{path}: {msg}")),
        e => e,
    })?;
    if let Some(s) = o.scheme {
        sc.config.scheme = s;
    }
    if let Some(s) = o.base_seed {
        sc.config.base_seed = s;
    }
    if let Some(n) = o.replications {
        if n == 0 {
            return Err(HarnessError::Config("--reps must be at least 1".into()));
        }
        sc.config.replications = n;
    }
    Ok(sc)
}

fn provenance(sc: &Scenario, command: &str) -> Provenance {
    Provenance {
        command: command.to_string(),
        config_sha256: sc.digest.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        base_seed: sc.config.base_seed,
        seeds: (0..sc.config.replications).map(|r| sc.seed(r)).collect(),
    }
}

fn anova_note(n: usize) -> Option<String> {
    (n < 2).then(|| format!("{n} replication(s) is insufficient for ANOVA"))
}

pub fn simulate(sc: &Scenario, out: Option<&Path>) -> Result<ExperimentReport, HarnessError> {
    let runs = run_replications_full(sc, sc.config.scheme, sc.config.vplus)?;
    let mut report = ExperimentReport::new(provenance(sc, "simulate"), runs.iter().map(|r| r.result.clone()).collect());
    report.notes.extend(anova_note(sc.config.replications));
    if let Some(dir) = out {
        export_report(&report, dir)?;
        let trips: Vec<(usize, &[_])> = runs.iter().map(|r| (r.replicate, r.trips.as_slice())).collect();
        export_trips(dir, &trips)?;
    }
    Ok(report)
}

pub fn compare(sc: &Scenario, schemes: &[SchemeId], out: Option<&Path>) -> Result<ExperimentReport, HarnessError> {
    let cells: Vec<(SchemeId, f64)> = schemes.iter().map(|&s| (s, sc.config.vplus)).collect();
    let grid = run_grid(sc, &cells)?;
    let results: Vec<ReplicationResult> = grid.iter().flatten().cloned().collect();
    let mut report = ExperimentReport::new(provenance(sc, "compare"), results);
    let by_scheme: Vec<(SchemeId, Vec<ReplicationResult>)> = schemes.iter().copied().zip(grid).collect();
    report.comparison = Some(compare_schemes(&by_scheme)?);
    if let Some(dir) = out {
        export_report(&report, dir)?;
    }
    Ok(report)
}

/// `volumes` are percentages.
pub fn sweep(sc: &Scenario, schemes: &[SchemeId], volumes: &[f64], out: Option<&Path>) -> Result<ExperimentReport, HarnessError> {
    let levels: Vec<f64> = volumes.iter().map(|v| v / 100.0).collect();
    let sweeps = volume_sweep(sc, schemes, &levels)?;
    let results = sweeps.iter().flat_map(|s| s.results.iter().cloned()).collect();
    let mut report = ExperimentReport::new(provenance(sc, "sweep"), results);
    report.sweeps = sweeps;
    if let Some(dir) = out {
        export_report(&report, dir)?;
    }
    Ok(report)
}

pub fn validate(sc: &Scenario, observed: &Path, out: Option<&Path>) -> Result<ExperimentReport, HarnessError> {
    let bytes = fs::read(observed).map_err(|e| HarnessError::Io { path: observed.display().to_string(), msg: e.to_string() })?;
    let records = ingest_observations(bytes.as_slice())?;
    let n = sc.config.replications;
    if n < 2 {
        return Err(HarnessError::Insufficient(anova_note(n).unwrap()));
    }
    let samples = observed_samples(&records, &sc.network, &sc.catalog, n)?;
    let runs = run_replications_full(sc, sc.config.scheme, sc.config.vplus)?;
    let results: Vec<ReplicationResult> = runs.into_iter().map(|r| r.result).collect();
    let mut report = ExperimentReport::new(provenance(sc, "validate"), results);
    report.validation = Some(validate_against_observed(&samples, &report.results)?);
    report.notes.push(format!("{} observed trips split into {n} blocks by entry time", records.len()));
    if let Some(dir) = out {
        export_report(&report, dir)?;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatsCommand {
    /// One-way ANOVA over `group,value` rows.
    Anova,
    /// Blocked ANOVA over `block,treatment,value` rows.
    AnovaBlocked,
    Dmrt,
    Regress,
}

/// Runs a statistic over CSV text and returns the rendered result.
pub fn stats(cmd: StatsCommand, input: &[u8]) -> Result<String, HarnessError> {
    Ok(match cmd {
        StatsCommand::Anova => render_anova("One-way ANOVA", &one_way_anova(&read_groups(input)?)?),
        StatsCommand::AnovaBlocked => render_anova("Randomized complete block ANOVA", &rcbd_anova(&read_blocks(input)?.data)?),
        StatsCommand::Dmrt => {
            let groups = read_groups(input)?;
            let n = groups[0].1.len();
            if groups.iter().any(|(_, v)| v.len() != n) {
                return Err(HarnessError::Insufficient("DMRT needs equal group sizes".into()));
            }
            let table = one_way_anova(&groups)?;
            let means: Vec<(String, f64)> =
                groups.iter().map(|(g, v)| (g.clone(), v.iter().sum::<f64>() / n as f64)).collect();
            let g = dmrt(&means, n, table.ms_error(), table.error().df, DMRT_ALPHA)?;
            render_anova("One-way ANOVA", &table) + "\n" + &render_dmrt("Duncan's multiple range test", &g, false)
        }
        StatsCommand::Regress => render_fit("y", "x", &linear_regression(&read_points(input)?)?) + "\n",
    })
}
