//! Exit codes and outputs of the command-line tool.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bicutan"))
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

#[test]
fn simulate_writes_results_and_trips() {
    let out = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["simulate", "--config"])
        .arg(scenario("reference.json"))
        .args(["--scheme", "t1", "--seed", "7", "--reps", "1", "--out"])
        .arg(out.path())
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let results = std::fs::read_to_string(out.path().join("results.csv")).unwrap();
    let rows: Vec<&str> = results.lines().collect();
    assert_eq!(rows[0], "scheme,vplus,replicate,seed,delta_s,sigma_kph,trips,unfinished");
    assert!(rows[1].starts_with("t1,0,0,7,"));
    assert!(out.path().join("trips_r00.csv").exists());
    assert!(String::from_utf8_lossy(&status.stdout).contains("insufficient for ANOVA"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"scheme": "t9"}"#).unwrap();
    for path in [bad, dir.path().join("missing.json")] {
        let s = bin().args(["simulate", "--config"]).arg(&path).output().unwrap().status;
        assert_eq!(s.code(), Some(2), "{}", path.display());
    }
}

#[test]
fn stats_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let groups = dir.path().join("g.csv");
    std::fs::write(&groups, "group,value\na,1\na,2\na,3\nb,5\nb,6\nb,7\n").unwrap();
    let points = dir.path().join("p.csv");
    std::fs::write(&points, "x,y\n0,1\n1,3\n2,5\n").unwrap();
    let run = |args: &[&str], input: &PathBuf| {
        let o = bin().arg("stats").args(args).arg("--input").arg(input).output().unwrap();
        assert!(o.status.success());
        String::from_utf8(o.stdout).unwrap()
    };
    assert!(run(&["anova"], &groups).contains("Treatment   1"));
    let d = run(&["dmrt"], &groups);
    assert!(d.contains("b            6.00  a") && d.contains("a            2.00  b"), "{d}");
    assert!(run(&["regress"], &points).starts_with("y = 2.00* x + 1.00*"));
    let bad = bin().args(["stats", "anova", "--input"]).arg(&points).output().unwrap().status;
    assert_eq!(bad.code(), Some(1));
}
