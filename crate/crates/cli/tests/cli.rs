use std::f64::consts::PI;
use std::process::{Command, Output};

fn ck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ck"))
        .args(args)
        .env_remove("CK_DEFAULT_TOL")
        .output()
        .expect("run ck")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// `(rep, value, err)` of each CSV data row.
fn rows(csv: &str) -> Vec<(String, f64, f64)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[5].to_string(), f[6].parse().unwrap(), f[7].parse().unwrap())
        })
        .collect()
}

#[test]
fn eval_closed_poisson() {
    let o = ck(&["eval", "--space", "euclidean", "--dim", "1", "--kind", "poisson", "--y", "1", "--r", "0", "--rep", "closed"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().next().unwrap(), "space,dim,kind,param,r,rep,value,err,convention");
    let r = rows(&out);
    assert_eq!(r.len(), 1);
    assert!((r[0].1 - 1.0 / PI).abs() < 1e-15);
}

#[test]
fn eval_classic_matches_raise() {
    let o = ck(&[
        "eval", "--space", "hyperbolic", "--dim", "3", "--kind", "heat", "--t", "1", "--r", "1", "--rep",
        "gruet-classic,raise",
    ]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    assert!((r[0].1 - r[1].1).abs() <= r[0].2 + r[1].2);
}

#[test]
fn eval_auto_equidistributes() {
    let o = ck(&["eval", "--rep", "auto", "--space", "sphere", "--dim", "1", "--kind", "heat", "--t", "10", "--r", "1"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    assert!((r[0].1 - 1.0 / (2.0 * PI)).abs() < 1e-4);
}

#[test]
fn table_cardinality_and_geometric_grid() {
    let o = ck(&[
        "table", "--space", "euclidean", "--dim", "2", "--kind", "heat", "--t-grid", "0.1:10:3", "--r-grid", "0:2:3",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 10);
    let ts: Vec<f64> = out.lines().skip(1).step_by(3).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(ts, vec![0.1, 1.0, 10.0]);
}

#[test]
fn table_is_deterministic() {
    let args = [
        "table", "--space", "hyperbolic", "--dim", "2", "--kind", "heat", "--t-grid", "0.5:2:2", "--r-grid", "0:3:3",
        "--rep", "raise,gruet",
    ];
    let a = ck(&args);
    let b = ck(&[&args[..], &["--sequential"]].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_round_trips_through_validate() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("t.json");
    let report = dir.path().join("r.json");
    let o = ck(&[
        "table", "--space", "sphere", "--dim", "3", "--kind", "poisson", "--y-grid", "0.3:2:3", "--r-grid", "0.3:2.8:3",
        "--rep", "closed,doubling", "--format", "json", "-o", table.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = ck(&["validate", "--from-file", table.to_str().unwrap(), "-o", report.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    let t: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&table).unwrap()).unwrap();
    assert_eq!(t["records"].as_array().unwrap().len(), 18);
    assert_eq!(t["meta"]["convention"], "paper");
}

#[test]
fn exit_codes() {
    let o = ck(&["eval", "--space", "euclidean", "--dim", "1", "--kind", "poisson", "--t", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ck(&["eval", "--space", "flatland", "--dim", "1", "--kind", "heat", "--t", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ck(&["eval", "--space", "hyperbolic", "--dim", "1", "--kind", "poisson", "--y", "4"]);
    assert_eq!(o.status.code(), Some(3));
    let o = ck(&["eval", "--space", "sphere", "--dim", "3", "--kind", "heat", "--t", "1", "--rep", "gruet-classic"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn tolerance_from_environment_and_flag() {
    let base = ["eval", "--space", "euclidean", "--dim", "1", "--kind", "heat", "--t", "1", "--format", "json"];
    let env = Command::new(env!("CARGO_BIN_EXE_ck")).args(base).env("CK_DEFAULT_TOL", "1e-6").output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&env.stdout).unwrap();
    assert_eq!(v["meta"]["tol"], 1e-6);
    let flag = Command::new(env!("CARGO_BIN_EXE_ck"))
        .args(base)
        .args(["--tol", "1e-8"])
        .env("CK_DEFAULT_TOL", "1e-6")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&flag.stdout).unwrap();
    assert_eq!(v["meta"]["tol"], 1e-8);
}

#[test]
fn validate_suites() {
    let o = ck(&["validate", "--suite", "representations", "--space", "euclidean"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for r in v["reports"].as_array().unwrap() {
        for d in r["pairwise"].as_array().unwrap() {
            assert!(d["max_rel_diff"].as_f64().unwrap() < 1e-8);
        }
    }
    let o = ck(&["validate", "--suite", "mass", "--space", "hyperbolic", "--dim", "3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let lambda = v["reports"][0]["fitted_shift"]["lambda"].as_f64().unwrap();
    assert!((lambda - 1.0).abs() < 1e-6);
}
