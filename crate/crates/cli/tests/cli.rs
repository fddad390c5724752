use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn spectrum_dir() -> (TempDir, PathBuf, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let osc = dir.path().join("osc1.json");
    std::fs::write(&osc, r#"{"kind":"oscillator","omegas":[1.0],"hbar":1.0}"#).unwrap();
    let levels = dir.path().join("levels.json");
    std::fs::write(&levels, r#"{"kind":"explicit","levels":[0.0,1.0,1.0,2.0,3.0,5.0,8.0]}"#).unwrap();
    (dir, osc, levels)
}

fn ecdim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecdim")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn fmax_of_unit_oscillator() {
    let (_d, osc, _) = spectrum_dir();
    let v = json(&ecdim(&["fmax", osc.to_str().unwrap(), "3", "--format", "json"]));
    assert!((v["F"].as_f64().unwrap() - 2.093943).abs() < 1e-6);
    assert!(v["fhat"].as_f64().unwrap() > v["F"].as_f64().unwrap());

    let bits = json(&ecdim(&[
        "fmax",
        osc.to_str().unwrap(),
        "3",
        "--format",
        "json",
        "--base",
        "two",
    ]));
    assert!((bits["F"].as_f64().unwrap() * 2f64.ln() - 2.093943).abs() < 1e-6);
}

#[test]
fn mdim_examples() {
    let (_d, osc, _) = spectrum_dir();
    let osc = osc.to_str().unwrap();
    let ea = json(&ecdim(&["mdim", "ea", osc, "3", "frac:0.1", "--format", "json"]));
    let m = ea["m"].as_u64().unwrap() as f64;
    assert!((m - 8.6e4).abs() / 8.6e4 <= 0.05, "m = {m}");
    assert!(ea["f_value"].as_f64().unwrap() <= ea["eps"].as_f64().unwrap());
    assert_eq!(ea["floor"], 40);
    assert_eq!(ea["floor_binding"], false);

    let chi = json(&ecdim(&[
        "mdim", "chi", osc, "3", "frac:0.1", "--alpha", "1", "--ec", "0", "--format", "json",
    ]));
    let m = chi["m"].as_u64().unwrap() as f64;
    assert!((m - 3.1e4).abs() / 3.1e4 <= 0.05, "m = {m}");
    assert!(chi["t"].as_f64().unwrap() > 0.0);

    let nat = json(&ecdim(&["mdim", "chi", osc, "3", "frac:0.1", "--format", "json"]));
    let two = json(&ecdim(&[
        "mdim", "chi", osc, "3", "frac:0.1", "--base", "two", "--format", "json",
    ]));
    assert_eq!(nat["m"], two["m"]);
    assert_eq!(two["log_base"], "two");
}

#[test]
fn absolute_tolerance_uses_the_reporting_base() {
    let (_d, osc, _) = spectrum_dir();
    let osc = osc.to_str().unwrap();
    let nat = json(&ecdim(&["mdim", "c", osc, "3", "abs:0.5", "--format", "json"]));
    let bits = 0.5 / 2f64.ln();
    let two = json(&ecdim(&[
        "mdim",
        "c",
        osc,
        "3",
        &format!("abs:{bits}"),
        "--base",
        "two",
        "--format",
        "json",
    ]));
    assert_eq!(nat["m"], two["m"]);
}

#[test]
fn table_exit_codes() {
    let one = ecdim(&["table", "1"]);
    assert_eq!(code(&one), 0);
    let csv = String::from_utf8(one.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("E_over_hbar_omega,capacity,epsilon_fraction,m,published_m,rel_err")
    );
    assert_eq!(lines.count(), 15);
    assert!(csv.contains("3,chi,0.1,4.96e9,5.0e9,"), "{csv}");

    assert_eq!(code(&ecdim(&["table", "9"])), 2);
    assert_eq!(code(&ecdim(&["table", "0"])), 2);

    // One published cell of table 2 is far from the computed value.
    let two = ecdim(&["table", "2"]);
    assert_eq!(code(&two), 1);
    assert_eq!(String::from_utf8(two.stdout).unwrap().lines().count(), 16);
    assert_eq!(code(&ecdim(&["table", "2", "--tol", "0.4"])), 0);
}

#[test]
fn table_json_carries_witnesses() {
    let v = json(&ecdim(&["table", "3", "--format", "json"]));
    let cells = v["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 12);
    for c in cells {
        let t = c["t"].as_f64().unwrap();
        assert!(t > 0.0 && t <= 0.5);
        assert!(c["rel_err"].as_f64().unwrap() <= 0.05);
    }
    assert_eq!(cells[3]["capacity"], "q");
    assert!(cells[3]["p"].as_f64().unwrap() > 1.0);
}

#[test]
fn vbound_reports_witness() {
    let (_d, osc, _) = spectrum_dir();
    let v = json(&ecdim(&[
        "vbound",
        "chi",
        osc.to_str().unwrap(),
        "3",
        "1e-6",
        "--format",
        "json",
    ]));
    assert!((v["value"].as_f64().unwrap() - 6.824760620067016).abs() < 1e-8);
    assert!(v["witness_m"].as_u64().unwrap().abs_diff(13_326) <= 3);
    assert_eq!(v["cap_reached"], false);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["kind", "E", "eps", "value", "witness_m", "log_base", "f_source"] {
        assert!(keys.contains(&k));
    }
}

#[test]
fn bound_subcommands() {
    let (_d, osc, _) = spectrum_dir();
    let osc = osc.to_str().unwrap();
    let q = json(&ecdim(&["bound", "lemma2", osc, "3", "100000", "--format", "json"]));
    let chi = json(&ecdim(&[
        "bound",
        "lemma2",
        osc,
        "3",
        "100000",
        "--variant",
        "single-copy",
        "--format",
        "json",
    ]));
    assert!(q["value"].as_f64().unwrap() > chi["value"].as_f64().unwrap());

    let l1 = json(&ecdim(&["bound", "lemma1", osc, "0.01", "3", "--format", "json"]));
    let l1p = json(&ecdim(&[
        "bound",
        "lemma1",
        osc,
        "0.01",
        "3",
        "--variant",
        "pure-states",
        "--format",
        "json",
    ]));
    assert!(l1p["value"].as_f64().unwrap() < l1["value"].as_f64().unwrap());

    let l5 = json(&ecdim(&[
        "bound", "lemma5", osc, "0.01", "3", "--t", "0.1", "--p", "2", "--format", "json",
    ]));
    assert!(l5["value"].as_f64().unwrap() > 0.0);
    assert_eq!(code(&ecdim(&["bound", "lemma5", osc, "0.01", "3", "--t", "0.1"])), 2);
    assert_eq!(
        code(&ecdim(&["bound", "lemma5", osc, "0.01", "3", "--t", "0.9", "--p", "2"])),
        3
    );

    let ecd = json(&ecdim(&["bound", "ecd", osc, "2.5", "9", "--format", "json"]));
    assert!((ecd["value"].as_f64().unwrap() - (2.0 / 9.0 + (2.0f64 / 9.0).sqrt())).abs() < 1e-12);
}

#[test]
fn explicit_spectrum() {
    let (_d, _, levels) = spectrum_dir();
    let levels = levels.to_str().unwrap();
    let f = json(&ecdim(&["fmax", levels, "1", "--format", "json"]));
    assert!(f["fhat"].is_null());
    assert!(f["F"].as_f64().unwrap() > 0.0);
    // Seven levels cannot make a small tolerance reachable.
    assert_eq!(code(&ecdim(&["mdim", "chi", levels, "1", "abs:1e-6"])), 5);
}

#[test]
fn error_exit_codes() {
    let (d, osc, _) = spectrum_dir();
    let osc = osc.to_str().unwrap();
    assert_eq!(code(&ecdim(&["fmax", "/nonexistent/spec.json", "3"])), 7);
    let broken = d.path().join("broken.json");
    std::fs::write(&broken, "{not json").unwrap();
    assert_eq!(code(&ecdim(&["fmax", broken.to_str().unwrap(), "3"])), 7);

    assert_eq!(code(&ecdim(&["fmax", osc, "0.2"])), 3);
    assert_eq!(code(&ecdim(&["mdim", "p", osc, "3", "frac:0.1", "--alpha", "1"])), 3);
    assert_eq!(code(&ecdim(&["vbound", "ea", osc, "3", "0.1"])), 3);
    assert_eq!(code(&ecdim(&["mdim", "q", osc, "3", "frac:0.1", "--cap", "1000"])), 5);
    assert_eq!(code(&ecdim(&["mdim", "q", osc, "3", "frac:0.1", "--cap", "0"])), 2);
    assert_eq!(code(&ecdim(&["table", "1", "--tol", "-1"])), 2);
    assert_eq!(code(&ecdim(&["mdim", "q", osc, "3", "frac:0.1", "--ec", "1"])), 2);

    let bad_threads = Command::new(env!("CARGO_BIN_EXE_ecdim"))
        .args(["fmax", osc, "3"])
        .env("ECDIM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&bad_threads), 2);
}

#[test]
fn verify_runs_clean() {
    let out = ecdim(&["verify", "gentle", "10000", "--seed", "7", "--format", "json"]);
    let v = json(&out);
    assert_eq!(v["trials"], 10_000);
    assert_eq!(v["seed"], 7);
    assert!(v["violations"].as_array().unwrap().is_empty());

    let all = json(&ecdim(&["verify", "all", "30", "--format", "json"]));
    assert_eq!(all.as_array().unwrap().len(), 8);
    assert_eq!(code(&ecdim(&["verify", "bogus"])), 2);
}
