use std::process::{Command, Output};

use rug::Float;
use serde_json::Value;

fn ivpcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ivpcount")).args(args).env_remove("IVPCOUNT_PRECISION").output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = ivpcount(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_str().expect("numbers are strings").parse().unwrap()
}

fn big(v: &Value) -> Float {
    Float::with_val(256, Float::parse(v.as_str().unwrap()).unwrap())
}

#[test]
fn capacity_reports_theta_value() {
    let v = json(&["capacity", "--a", "2", "--b", "3"]);
    assert_eq!(v["method"], "theta");
    assert!((num(&v["gamma"]) - 0.935083628749).abs() < 1e-11);
    assert!(num(&v["error"]) < 1e-30);
    assert!(v.get("cross_check").is_none());
}

#[test]
fn capacity_near_golden_is_at_least_one() {
    let v = json(&["capacity", "--a", "1.618034", "--b", "1.618034", "--cross-check", "--kmax", "40"]);
    assert!(num(&v["gamma"]) >= 1.0 - 1e-6);
    assert_eq!(v["cross_check"]["method"], "op_ratio");
}

#[test]
fn capacity_rejects_base_one() {
    assert_eq!(ivpcount(&["capacity", "--a", "1.0", "--b", "2"]).status.code(), Some(2));
    assert_eq!(ivpcount(&["capacity", "--a", "x", "--b", "2"]).status.code(), Some(2));
}

#[test]
fn critical_curve_is_monotone() {
    let out = ivpcount(&["critical-curve", "--a-min", "1.8", "--a-max", "3.0", "--steps", "25", "--tol", "1e-12"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("A,B_critical,gamma_residual,flag"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 25);
    let bs: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(bs.windows(2).all(|w| w[1] < w[0]));
    for r in &rows {
        assert_eq!(r[3], "ok");
        assert!(r[2].parse::<f64>().unwrap().abs() <= 1e-11);
    }
}

#[test]
fn critical_curve_swapped_endpoints() {
    assert_eq!(ivpcount(&["critical-curve", "--a-min", "3.0", "--a-max", "1.8"]).status.code(), Some(2));
    assert_eq!(ivpcount(&["critical-curve", "--a-min", "1.5", "--a-max", "1.8"]).status.code(), Some(2));
}

#[test]
fn search_below_phi_is_empty() {
    let v = json(&["search", "--mode", "l2", "--a", "golden", "--t-squared-below-phi", "--degree", "4"]);
    assert_eq!(v["count"], "0");
    assert_eq!(v["count_ambiguous"], "0");
}

#[test]
fn search_weighted_writes_witnesses() {
    let dir = std::env::temp_dir().join(format!("ivpcount-w-{}", std::process::id()));
    let path = dir.with_extension("csv");
    let p = path.to_str().unwrap();
    let v = json(&["search", "--mode", "l2w", "--a", "golden", "--t-squared", "0.6366", "--degree", "2", "--witnesses-out", p]);
    assert!(num(&v["count"]) >= 1.0);
    let csv = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("degree,c_0,c_1,c_2"));
    assert!(csv.lines().any(|l| l == "2,0,-1,1"));
}

#[test]
fn search_sup_norm_meets_vaaler() {
    let v = json(&["search", "--mode", "linf", "--a", "golden", "--t", "1.85", "--degree", "4"]);
    assert!(num(&v["count"]) >= num(&v["vaaler_lower"]));
}

#[test]
fn search_dimension_cap() {
    let out = ivpcount(&["search", "--mode", "l2", "--a", "golden", "--t", "3", "--degree", "12"]);
    assert_eq!(out.status.code(), Some(4));
    let out = ivpcount(&["--dim-cap", "3", "search", "--mode", "l2", "--a", "2", "--t", "3", "--degree", "3"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn search_needs_a_threshold() {
    assert_eq!(ivpcount(&["search", "--mode", "l2", "--a", "2", "--degree", "1"]).status.code(), Some(2));
    let both = ["search", "--mode", "l2", "--a", "2", "--t", "1", "--t-squared", "1", "--degree", "1"];
    assert_eq!(ivpcount(&both).status.code(), Some(2));
}

#[test]
fn gram_golden_log_det() {
    let v = json(&["gram", "--mode", "l2", "--a", "golden", "--t", "1", "--degree", "10"]);
    let phi = (Float::with_val(256, 5).sqrt() + 1u32) / 2u32;
    let expect = phi.ln() * 11u32;
    let got = big(&v["log_det"]["value"]);
    assert!(Float::with_val(256, got - expect).abs() < 1e-20);
    assert_eq!(v["op_norms"]["norms"].as_array().unwrap().len(), 11);
    assert!(v["matrix"].is_null());
}

#[test]
fn volume_sup_norm_interval() {
    let v = json(&["volume", "--mode", "linf", "--a", "2", "--t", "1.5", "--degree", "0"]);
    assert!((num(&v["logvol"]["value"]) - 3f64.ln()).abs() < 1e-15);
    assert!(v["diagnostic"].is_null());
}

#[test]
fn volume_diagnostic_shrinks_on_critical_curve() {
    let diag: Vec<f64> = ["10", "20", "30"]
        .iter()
        .map(|d| {
            let v = json(&["volume", "--mode", "l2", "--a", "2", "--b", "3.7325822414895303", "--t", "2", "--degree", d]);
            num(&v["diagnostic_outer"]).abs().max(num(&v["diagnostic"]).abs())
        })
        .collect();
    assert!(diag.windows(2).all(|w| w[1] < w[0]), "{diag:?}");
}

#[test]
fn output_is_deterministic() {
    let args = ["gram", "--mode", "l2", "--a", "2", "--b", "3", "--t", "1", "--degree", "6", "--matrix"];
    let a = ivpcount(&args).stdout;
    let mut one = vec!["--threads", "1"];
    one.extend(args);
    assert_eq!(a, ivpcount(&one).stdout);
    assert_eq!(a, ivpcount(&args).stdout);
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_ivpcount"))
        .args(["capacity", "--a", "2", "--b", "2"])
        .env("IVPCOUNT_PRECISION", "128")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let digits = v["gamma"].as_str().unwrap().trim_start_matches('-').split('e').next().unwrap().replace('.', "").len();
    assert_eq!(digits, 38);
    assert_eq!(ivpcount(&["--precision", "32", "capacity", "--a", "2", "--b", "2"]).status.code(), Some(2));
}

#[test]
fn verify_single_criterion() {
    let out = ivpcount(&["verify", "--criterion", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PASS criterion  1"));
}

#[test]
fn verify_low_precision_fails_cleanly() {
    let out = ivpcount(&["--precision", "64", "verify", "--criterion", "1,2"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL criterion  1"));
}

fn no_binary_numbers(v: &Value) -> bool {
    match v {
        Value::Number(_) => false,
        Value::Array(a) => a.iter().all(no_binary_numbers),
        Value::Object(o) => o.values().all(no_binary_numbers),
        _ => true,
    }
}

#[test]
fn json_numbers_are_strings() {
    let runs: [&[&str]; 4] = [
        &["gram", "--mode", "l2", "--a", "2", "--b", "3", "--t", "1", "--degree", "3", "--matrix"],
        &["volume", "--mode", "linf", "--a", "golden", "--t", "1.9", "--degree", "3"],
        &["capacity", "--a", "2", "--b", "3", "--cross-check", "--kmax", "30"],
        &["search", "--mode", "linf", "--a", "golden", "--t", "1.9", "--degree", "2"],
    ];
    for args in runs {
        let v = json(args);
        assert!(no_binary_numbers(&v), "{args:?}: {v}");
    }
}
