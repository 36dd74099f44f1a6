use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn spmac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spmac")).args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn stderr_error(o: &Output) -> Value {
    let v: Value = serde_json::from_slice(&o.stderr).expect("stderr is JSON");
    assert_eq!(v["schema"], "spmac/1");
    v["error"].clone()
}

#[test]
fn holevo_one_sender_value() {
    let v = stdout_json(&spmac(&["holevo", "one-sender"]));
    assert_eq!(v["schema"], "spmac/1");
    assert!((v["value_bits"].as_f64().unwrap() - 1.2339).abs() < 1e-4);
}

#[test]
fn assisted_rate_sum_for_two_senders() {
    let v = stdout_json(&spmac(&["ratesum", "--n", "2", "--protocol", "assisted"]));
    let value = v["value_bits"].as_f64().unwrap();
    assert!((value - 1.0875).abs() < 1e-4, "{value}");
    assert!(v["upper_bound_bits"].as_f64().unwrap() >= value - 1e-12);
    assert_eq!(v["seed"], 0);
}

#[test]
fn classical_region_three_rows() {
    let o = spmac(&["classical", "region", "--grid", "3"]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap().iter().next_back(), Some("R_sum"));
    let rows: Vec<Vec<f64>> =
        rdr.records().map(|r| r.unwrap().iter().map(|f| f.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3);
    let lams: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(lams, [0.0, 0.5, 1.0]);
    assert!(rows.iter().all(|r| r[5] <= 1.0 + 1e-9));
}

#[test]
fn pentagon_csv_has_five_vertices() {
    let o = spmac(&["region", "--protocol", "assisted2", "--prior", "0.5,0.8823529411764706"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "vertex,R1,R2");
    assert_eq!(lines.len(), 6);
    let star: Vec<f64> = lines[4].split(',').skip(1).map(|f| f.parse().unwrap()).collect();
    assert!((star[0] + star[1] - (17.0f64 / 8.0).log2()).abs() < 1e-9);
}

#[test]
fn same_seed_writes_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let path = dir.path().join(name);
        let o = spmac(&["experiment", "montecarlo", "--seed", seed, "--n", "200", "--out", path.to_str().unwrap()]);
        assert!(o.status.success());
        assert!(o.stdout.is_empty());
        std::fs::read(path).unwrap()
    };
    let (a, b, c) = (run("a.json", "7"), run("b.json", "7"), run("c.json", "8"));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn count_table_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("counts.csv");
    let o = spmac(&["experiment", "montecarlo", "--format", "csv", "--n", "40", "--m", "10", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_path(Path::new(&path)).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["x1", "x2", "y", "count"]);
    let total: u64 = rdr.records().map(|r| r.unwrap()[3].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 400);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["bogus"][..],
        &["ratesum"],
        &["ratesum", "--n", "2", "--tol", "0"],
        &["one-sender", "acc-info", "--q", "2", "--theta", "0.1"],
        &["region", "--prior", "0.5"],
        &["holevo", "one-sender", "--format", "csv"],
        &["reproduce", "all", "--criteria", "15"],
    ] {
        let o = spmac(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert_eq!(stderr_error(&o)["kind"], "usage", "{args:?}");
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn non_convergence_exits_one() {
    let o = spmac(&["ratesum", "--n", "4", "--tol", "1e-300", "--restarts", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr_error(&o);
    assert_eq!(e["kind"], "numerical");
    assert!(e["message"].as_str().unwrap().contains("converge"));
}

#[test]
fn help_exits_zero() {
    let o = spmac(&["--help"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("ratesum"));
}

#[test]
fn thread_cap_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_spmac"))
        .args(["holevo", "logn", "--n", "3"])
        .env("SPMAC_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_spmac"))
        .args(["holevo", "logn", "--n", "3"])
        .env("SPMAC_THREADS", "1")
        .output()
        .unwrap();
    assert!((stdout_json(&o)["value_bits"].as_f64().unwrap() - 3f64.log2()).abs() < 1e-9);
}

#[test]
fn reproduce_manifest_subset_is_deterministic() {
    let a = spmac(&["reproduce", "all", "--criteria", "1,9"]);
    let b = spmac(&["reproduce", "all", "--criteria", "1,9"]);
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    let ids: Vec<u64> = v["criteria"].as_array().unwrap().iter().map(|c| c["id"].as_u64().unwrap()).collect();
    assert_eq!(ids, [1, 9]);
    assert_eq!(v["failed"].as_array().unwrap().len(), 0);
}
