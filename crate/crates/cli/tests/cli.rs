use std::f64::consts::PI;
use std::process::{Command, Output};

use fracap_core::besov::tent;
use serde_json::Value;

fn fracap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracap")).args(args).env_remove("FRACAP_SEED").output().unwrap()
}

fn records(out: &Output) -> Vec<Value> {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn unit_interval_perimeter() {
    let out = fracap(&["perimeter", "--shape", "interval:a=0,b=1", "--n", "1", "--alpha", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &records(&out)[0];
    // 2 L^{1-α} / (α(1-α)) with L = 1
    assert!((num(r, "value") - 2.0 / (0.5 * 0.5)).abs() < 1e-8);
    assert!(num(r, "error") <= 1e-8);
}

#[test]
fn tent_cap_strong_sobolev_is_an_equality() {
    let out = fracap(&["verify", "--ineq", "eq1", "--function", "tent:n=1", "--alpha", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let rs = records(&out);
    assert_eq!(rs.len(), 1);
    assert_eq!(rs[0]["id"], "eq1");
    assert_eq!(rs[0]["status"], "pass");
    assert!((num(&rs[0], "ratio") - 1.0).abs() < 1e-6);
}

#[test]
fn disk_limit_at_zero() {
    let out = fracap(&["limits", "--shape", "ball:n=2,r=1", "--end", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let rs = records(&out);
    let p = rs.iter().find(|r| r["quantity"] == "perimeter").unwrap();
    // n ω_n V for the unit disk
    let target = 2.0 * PI * PI;
    assert!((num(p, "extrapolated") / target - 1.0).abs() < 0.02);
    let c = rs.iter().find(|r| r["quantity"] == "capacity").unwrap();
    assert!((num(c, "extrapolated") / (2.0 * target) - 1.0).abs() < 0.02);
    assert!(rs.iter().all(|r| r["end"] == 0));
}

#[test]
fn parse_errors_exit_with_two_and_a_position() {
    let out = fracap(&["perimeter", "--shape", "ball:n=2,r=oops"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("column 12"), "{err}");
    assert!(err.contains("           ^"), "{err}");
    assert!(out.stdout.is_empty());
    for args in [
        &["verify", "--ineq", "eq9"][..],
        &["perimeter", "--shape", "interval:a=0,b=1", "--n", "2"],
        &["perimeter"],
        &["verify", "--ineq", "eq4", "--function", "tent:n=1"],
        &["besov", "--function", "cutoff:shape=ball:n=2"],
    ] {
        assert_eq!(fracap(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn convergence_failure_still_reports_the_best_estimate() {
    let out = fracap(&["perimeter", "--shape", "interval:a=0,b=1", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(3));
    let r = &records(&out)[0];
    assert_eq!(r["converged"], false);
    assert!((num(r, "value") - 8.0).abs() < 1e-8);
}

#[test]
fn csv_and_json_carry_identical_numbers() {
    let base = ["perimeter", "--shape", "ball:n=2,r=1", "--alpha-grid", "0.2:0.8:3", "--method", "mc", "--samples", "20000"];
    let json = records(&fracap(&base));
    let csv_out = fracap(&[&base[..], &["--output", "csv"]].concat());
    let mut rd = csv::Reader::from_reader(csv_out.stdout.as_slice());
    let headers = rd.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), json.len());
    for (row, rec) in rows.iter().zip(&json) {
        for (h, cell) in headers.iter().zip(row.iter()) {
            match &rec[h] {
                Value::Number(n) if n.is_f64() => assert_eq!(cell.parse::<f64>().unwrap(), n.as_f64().unwrap()),
                Value::Number(n) => assert_eq!(cell, n.to_string()),
                Value::String(s) => assert_eq!(cell, s),
                Value::Bool(b) => assert_eq!(cell, b.to_string()),
                other => panic!("unexpected {other}"),
            }
        }
    }
}

#[test]
fn output_is_byte_identical_across_runs_and_workers() {
    let run = |w: &str| {
        fracap(&["perimeter", "--shape", "box:lo=0,0,0;hi=1,2,1", "--method", "mc", "--samples", "50000", "--seed", "11", "--workers", w])
            .stdout
    };
    let one = run("1");
    assert_eq!(one, run("1"));
    assert_eq!(one, run("2"));
    assert_eq!(one, run("8"));
}

#[test]
fn seed_comes_from_the_environment_unless_given() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_fracap"));
        c.args(["perimeter", "--shape", "ball:n=2", "--method", "mc", "--samples", "2000"]).env_remove("FRACAP_SEED");
        if let Some(s) = env {
            c.env("FRACAP_SEED", s);
        }
        if let Some(s) = flag {
            c.args(["--seed", s]);
        }
        records(&c.output().unwrap())[0]["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, None), 0);
    assert_eq!(run(Some("9"), None), 9);
    assert_eq!(run(Some("9"), Some("4")), 4);
}

#[test]
fn every_record_carries_provenance() {
    let cases: [&[&str]; 6] = [
        &["constants", "--n", "2", "--alpha", "0.5"],
        &["perimeter", "--shape", "box:lo=0,0;hi=1,2"],
        &["besov", "--function", "tent:n=1,res=64"],
        &["capacity", "--shape", "interval:a=-1,b=1"],
        &["verify", "--shape", "ball:n=2", "--alpha-grid", "0.3:0.7:2"],
        &["limits", "--shape", "interval:a=0,b=1", "--end", "1"],
    ];
    for args in cases {
        let out = fracap(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        for r in records(&out) {
            for key in ["value", "error", "method", "samples", "seed"] {
                assert!(r.get(key).is_some(), "{args:?}: {key} missing in {r}");
            }
        }
    }
}

#[test]
fn capacity_record_brackets_the_interval() {
    let r = &records(&fracap(&["capacity", "--shape", "interval:a=-1,b=1"]))[0];
    let want = 16.0 * 2f64.sqrt();
    assert!((num(r, "lower") / want - 1.0).abs() < 1e-6);
    assert!((num(r, "upper") / want - 1.0).abs() < 1e-6);
    assert_eq!(r["witness"], "dilates s=0e0");
}

#[test]
fn grid_files_and_output_paths() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("tent.txt");
    std::fs::write(&grid, tent(1, 64.0).unwrap().to_grid_text()).unwrap();
    let out_path = dir.path().join("out.json");
    let from_file = format!("file:{}", grid.display());
    let out = fracap(&["besov", "--function", &from_file, "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let saved: Vec<Value> = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let direct = records(&fracap(&["besov", "--function", "tent:n=1,res=64"]));
    for (a, b) in saved.iter().zip(&direct) {
        assert_eq!(num(a, "value"), num(b, "value"));
    }
    let bare = fracap(&["besov", "--function", grid.to_str().unwrap()]);
    assert_eq!(bare.status.code(), Some(0));
}

#[test]
fn whole_suite_verifies() {
    let out = fracap(&["verify", "--alpha", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rs = records(&out);
    assert!(rs.len() >= 40);
    assert!(rs.iter().all(|r| r["status"] == "pass"));
}
