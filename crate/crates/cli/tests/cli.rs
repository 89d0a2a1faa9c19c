use std::process::{Command, Output};

use serde_json::Value;

fn mkclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mkclab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = mkclab(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

const HALF_PI: &str = "1.5707963267948966";

#[test]
fn correlations_xxx_and_xyy() {
    let xxx = format!("{HALF_PI},0;{HALF_PI},0;{HALF_PI},0");
    let v = json(&["correlations", "--triplet", &xxx]);
    assert!((v["matrix_value"].as_f64().unwrap() + 1.0).abs() < 1e-10);
    assert!((v["closed_form_value"].as_f64().unwrap() + 1.0).abs() < 1e-10);

    let xyy = format!("{HALF_PI},0;{HALF_PI},{HALF_PI};{HALF_PI},{HALF_PI}");
    let v = json(&["correlations", "--triplet", &xyy]);
    assert!((v["matrix_value"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn malformed_triplet_is_a_validation_error() {
    let out = mkclab(&["correlations", "--triplet", "1,2;3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn rationals_json_and_csv() {
    let v = json(&["mkc", "rationals", "--bound", "1"]);
    assert_eq!(v["count"], 6);
    assert_eq!(v["directions"].as_array().unwrap().len(), 6);

    let out = mkclab(&["mkc", "rationals", "--bound", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,z"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 30);
    for row in rows {
        let cells: Vec<(i64, i64)> = row
            .split(',')
            .map(|c| {
                let (p, q) = c.split_once('/').unwrap();
                (p.parse().unwrap(), q.parse().unwrap())
            })
            .collect();
        let q = cells[0].1;
        assert_eq!(cells.iter().map(|(p, _)| p * p).sum::<i64>(), q * q);
    }
}

#[test]
fn rationals_reject_zero_bound() {
    assert_eq!(
        mkclab(&["mkc", "rationals", "--bound", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn hvm_parity_and_maxmin() {
    let v = json(&["hvm", "parity"]);
    assert_eq!(v["checked"], 64);
    assert_eq!(v["product_minus_one"], 64);
    assert_eq!(v["all_four_plus"], 0);

    let v = json(&["hvm", "maxmin"]);
    assert_eq!(v["value_exact"], "1/2");
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn epsilon_sweep_csv_has_one_row_per_grid_point() {
    let out = mkclab(&[
        "epsilon-sweep",
        "--delta-max",
        "0.1",
        "--steps",
        "5",
        "--seed",
        "1",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("delta,worst_eps"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn sweep_rejects_bad_grid() {
    let out = mkclab(&["epsilon-sweep", "--delta-max", "2", "--steps", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn section_reports() {
    let v = json(&[
        "section2", "--delta", "0.01", "--bound", "50", "--seed", "4",
    ]);
    assert_eq!(v["verdict"]["verdict"], "IMPOSSIBLE-FOR-PRODUCT-MODELS");
    assert!(v["verdict"]["slack"].as_f64().unwrap() >= 0.499);
    assert_eq!(v["intersection_measure"].as_f64().unwrap(), 0.0);

    let v = json(&["section3", "--eta", "0.01", "--seed", "2"]);
    assert_eq!(v["verdict"]["verdict"], "IMPOSSIBLE-FOR-PRODUCT-MODELS");
    assert!(v["max_commutator_norm"].as_f64().unwrap() <= 1e-10);

    assert_eq!(mkclab(&["section3", "--eta", "0"]).status.code(), Some(2));
}

#[test]
fn simulate_writes_reproducible_records() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.ndjson");
    let b = dir.path().join("b.ndjson");
    for path in [&a, &b] {
        let v = json(&[
            "simulate",
            "--model",
            "quantum",
            "--rounds",
            "500",
            "--delta",
            "0.02",
            "--seed",
            "9",
            "--records",
            path.to_str().unwrap(),
        ]);
        assert_eq!(v["rounds"], 500);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let lines: Vec<Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 500);
    for (i, rec) in lines.iter().enumerate() {
        assert_eq!(rec["round"], i as u64);
        let product: i64 = rec["outcomes"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| s.as_i64().unwrap())
            .product();
        assert_eq!(rec["product"].as_i64().unwrap(), product);
    }
}

#[test]
fn simulate_validation() {
    let out = mkclab(&["simulate", "--model", "quantum", "--rounds", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = mkclab(&["simulate", "--model", "classical", "--rounds", "10"]);
    assert_eq!(out.status.code(), Some(2));
}
