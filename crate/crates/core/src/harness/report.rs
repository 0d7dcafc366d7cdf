//! Experiment reports and their on-disk forms.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::compare::Comparison;
use super::sweep::SchemeSweep;
use super::validate::Validation;
use super::HarnessError;
use crate::metrics::{write_trips_csv, ReplicationResult, TripRecord};
use crate::schemes::SchemeId;
use crate::stats::render::{format_num, format_p, render_anova, render_dmrt, render_fit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub command: String,
    pub config_sha256: String,
    pub version: String,
    pub base_seed: u64,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub provenance: Provenance,
    pub results: Vec<ReplicationResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweeps: Vec<SchemeSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<Validation>,
    pub notes: Vec<String>,
}

pub const RESULTS_HEADER: &str = "scheme,vplus,replicate,seed,delta_s,sigma_kph,trips,unfinished";

impl ExperimentReport {
    pub fn new(provenance: Provenance, results: Vec<ReplicationResult>) -> Self {
        Self { provenance, results, comparison: None, sweeps: Vec::new(), validation: None, notes: Vec::new() }
    }

    pub fn results_csv(&self) -> String {
        let mut s = String::from(RESULTS_HEADER);
        s.push('\n');
        for r in &self.results {
            writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                r.scheme,
                r.vplus,
                r.seed - self.provenance.base_seed,
                r.seed,
                r.delta,
                r.sigma,
                r.trips,
                r.unfinished
            )
            .unwrap();
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn render_text(&self) -> String {
        let p = &self.provenance;
        let mut out = String::new();
        writeln!(out, "bicutan {} report", p.command).unwrap();
        writeln!(out, "version {}, config sha256 {}", p.version, p.config_sha256).unwrap();
        writeln!(out, "base seed {}, replications {}", p.base_seed, p.seeds.len()).unwrap();
        for n in &self.notes {
            writeln!(out, "note: {n}").unwrap();
        }
        out.push('\n');
        out.push_str(&render_results(&self.results));

        if let Some(v) = &self.validation {
            out.push('\n');
            out.push_str(&render_anova("Delay: observed vs simulated baseline", &v.anova_delta));
            out.push_str(&render_anova("Speed: observed vs simulated baseline", &v.anova_sigma));
            for (what, p, ok) in [("delay", v.p_delta, v.accept_delta), ("speed", v.p_sigma, v.accept_sigma)] {
                let verdict = if ok { "no significant difference" } else { "significant difference" };
                writeln!(out, "{what}: p = {} vs alpha = {}: {verdict}", format_p(p), v.alpha).unwrap();
            }
        }

        if let Some(c) = &self.comparison {
            out.push('\n');
            out.push_str(&render_anova("Mean delay (s) across schemes", &c.anova_delta));
            out.push('\n');
            out.push_str(&render_anova("Mean speed (kph) across schemes", &c.anova_sigma));
            for (what, p) in [("delay", c.delta_p()), ("speed", c.sigma_p())] {
                let verdict = if p < 0.05 { "schemes differ" } else { "no significant difference among schemes" };
                writeln!(out, "{what}: p = {} vs alpha = 0.05: {verdict}", format_p(p)).unwrap();
            }
            out.push('\n');
            out.push_str(&render_dmrt("Duncan groups, mean delay (s)", &c.dmrt_delta, false));
            out.push('\n');
            out.push_str(&render_dmrt("Duncan groups, mean speed (kph)", &c.dmrt_sigma, true));
            out.push('\n');
            let cands: Vec<&str> = c.best.candidates.iter().map(|s| s.as_str()).collect();
            writeln!(out, "best scheme: {} ({})", c.best.scheme, c.best.rule.describe()).unwrap();
            writeln!(out, "schemes in both top groups: {}", if cands.is_empty() { "none".into() } else { cands.join(", ") })
                .unwrap();
        }

        for s in &self.sweeps {
            out.push('\n');
            writeln!(out, "Volume sweep, scheme {}", s.scheme).unwrap();
            writeln!(out, "{:>8}  {:>12}  {:>10}  {:>12}  {:>10}", "V+ (%)", "delay (s)", "stderr", "speed (kph)", "stderr").unwrap();
            for l in &s.levels {
                writeln!(
                    out,
                    "{:>8}  {:>12}  {:>10}  {:>12}  {:>10}",
                    format_num(l.vplus * 100.0),
                    format_num(l.mean_delta),
                    format_num(l.stderr_delta),
                    format_num(l.mean_sigma),
                    format_num(l.stderr_sigma)
                )
                .unwrap();
            }
            writeln!(out, "{}", render_fit(&format!("delay({})", s.scheme), "V+", &s.fit_delta)).unwrap();
            writeln!(out, "{}", render_fit(&format!("speed({})", s.scheme), "V+", &s.fit_sigma)).unwrap();
        }
        out
    }

    /// One row per scheme: mean and standard error from the ANOVA error term.
    pub fn plot_schemes_csv(&self) -> Option<String> {
        let c = self.comparison.as_ref()?;
        let mut s = String::from("scheme,delta_mean,delta_stderr,sigma_mean,sigma_stderr\n");
        for m in &c.means {
            writeln!(s, "{},{},{},{},{}", m.scheme, m.delta, c.stderr_delta(), m.sigma, c.stderr_sigma()).unwrap();
        }
        Some(s)
    }

    pub fn plot_volume_csv(&self) -> Option<String> {
        if self.sweeps.is_empty() {
            return None;
        }
        let mut s = String::from("scheme,vplus_pct,delta_mean,delta_stderr,sigma_mean,sigma_stderr,delta_fit,sigma_fit\n");
        for sw in &self.sweeps {
            for l in &sw.levels {
                let x = l.vplus * 100.0;
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    sw.scheme,
                    x,
                    l.mean_delta,
                    l.stderr_delta,
                    l.mean_sigma,
                    l.stderr_sigma,
                    sw.fit_delta.predict(x),
                    sw.fit_sigma.predict(x)
                )
                .unwrap();
            }
        }
        Some(s)
    }
}

fn render_results(results: &[ReplicationResult]) -> String {
    let mut out = String::new();
    writeln!(out, "{:<8}  {:>6}  {:>12}  {:>10}  {:>12}  {:>6}  {:>10}", "scheme", "V+", "seed", "delay (s)", "speed (kph)", "trips", "unfinished")
        .unwrap();
    for r in results {
        writeln!(
            out,
            "{:<8}  {:>6}  {:>12}  {:>10}  {:>12}  {:>6}  {:>10}",
            r.scheme.as_str(),
            format_num(r.vplus),
            r.seed,
            format_num(r.delta),
            format_num(r.sigma),
            r.trips,
            r.unfinished
        )
        .unwrap();
    }
    out
}

/// Parses `results.csv` back into results.
pub fn read_results_csv(text: &str) -> Result<Vec<ReplicationResult>, HarnessError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| HarnessError::Config(e.to_string()))?;
    if header.iter().collect::<Vec<_>>().join(",") != RESULTS_HEADER {
        return Err(HarnessError::Config(format!("results header must be {RESULTS_HEADER}")));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let bad = |m: String| HarnessError::Config(format!("results row {}: {m}", i + 1));
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |k: usize| rec[k].parse::<f64>().map_err(|e| bad(e.to_string()));
        let int = |k: usize| rec[k].parse::<u64>().map_err(|e| bad(e.to_string()));
        out.push(ReplicationResult {
            scheme: rec[0].parse::<SchemeId>().map_err(|e| bad(e.to_string()))?,
            vplus: num(1)?,
            seed: int(3)?,
            delta: num(4)?,
            sigma: num(5)?,
            trips: int(6)? as usize,
            unfinished: int(7)? as usize,
        });
    }
    Ok(out)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), HarnessError> {
    let p = dir.join(name);
    fs::write(&p, contents).map_err(|e| HarnessError::Io { path: p.display().to_string(), msg: e.to_string() })
}

/// Writes `report.txt`, `report.json`, `results.csv` and any plot series.
pub fn export_report(report: &ExperimentReport, dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::Io { path: dir.display().to_string(), msg: e.to_string() })?;
    write(dir, "report.txt", &report.render_text())?;
    write(dir, "report.json", &report.to_json())?;
    write(dir, "results.csv", &report.results_csv())?;
    if let Some(s) = report.plot_schemes_csv() {
        write(dir, "plot_schemes.csv", &s)?;
    }
    if let Some(s) = report.plot_volume_csv() {
        write(dir, "plot_volume.csv", &s)?;
    }
    Ok(())
}

/// Writes `trips_rNN.csv` for each replication.
pub fn export_trips(dir: &Path, runs: &[(usize, &[TripRecord])]) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::Io { path: dir.display().to_string(), msg: e.to_string() })?;
    for (rep, trips) in runs {
        let p = dir.join(format!("trips_r{rep:02}.csv"));
        let f = fs::File::create(&p).map_err(|e| HarnessError::Io { path: p.display().to_string(), msg: e.to_string() })?;
        write_trips_csv(trips, std::io::BufWriter::new(f))
            .map_err(|e| HarnessError::Io { path: p.display().to_string(), msg: e.to_string() })?;
    }
    Ok(())
}
