//! Runs every parser over the checked-in fuzz seeds.

use std::fs;
use std::path::PathBuf;

use bicutan::demand::{ingest_observations, DemandProfile};
use bicutan::harness::{read_results_csv, ScenarioConfig};
use bicutan::stats::input::{read_blocks, read_groups, read_points};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn observation_seeds() {
    for (name, data) in seeds("observations") {
        let r = ingest_observations(data.as_slice());
        assert_eq!(r.is_ok(), name == "sample", "{name}: {r:?}");
    }
}

#[test]
fn scenario_config_seeds() {
    for (name, data) in seeds("scenario_config") {
        let r = ScenarioConfig::parse(std::str::from_utf8(&data).unwrap());
        match r {
            Ok(c) => assert_eq!(ScenarioConfig::parse(&c.render()).unwrap(), c, "{name}"),
            Err(_) => assert_eq!(name, "bad_warmup"),
        }
    }
}

#[test]
fn demand_profile_seeds() {
    for (name, data) in seeds("demand_profile") {
        assert_eq!(DemandProfile::from_json(&data).is_ok(), name != "negative", "{name}");
    }
}

#[test]
fn stats_input_seeds() {
    for (name, data) in seeds("stats_input") {
        let (g, b, p) = (read_groups(data.as_slice()), read_blocks(data.as_slice()), read_points(data.as_slice()));
        match name.as_str() {
            "groups" => assert!(g.is_ok() && b.is_err()),
            "blocks" => assert!(b.is_ok()),
            "points" => assert!(p.is_ok()),
            _ => {}
        }
    }
}

#[test]
fn results_csv_seeds() {
    for (name, data) in seeds("results_csv") {
        let r = read_results_csv(std::str::from_utf8(&data).unwrap());
        assert_eq!(r.is_ok(), name == "compare", "{name}: {r:?}");
    }
}
