//! Runs the documented command lines and checks their stated values.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_free-stein"));
    c.env_remove("FREE_STEIN_CAP");
    c
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn csv_rows(text: &str) -> Vec<(f64, f64, String)> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rd.headers().unwrap().iter().collect::<Vec<_>>(),
        ["parameter", "value", "diagnostics"]
    );
    rd.records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].to_string())
        })
        .collect()
}

#[test]
fn semicircular_pair_has_full_dimension() {
    let f = fixture("semicircular2.json");
    let v = json_of(&run(&["irregularity", "--model", f.to_str().unwrap(), "--dxi", "3"]));
    assert_eq!(v["schema"], "free-stein/1");
    assert!((v["sigma"].as_f64().unwrap() - 2.0).abs() < 1e-6, "{v}");
}

#[test]
fn two_point_closed_form() {
    let f = fixture("twopoint.json");
    let v = json_of(&run(&["closed-form", "one-var", "--model", f.to_str().unwrap()]));
    assert_eq!(v["sigma"].as_f64().unwrap(), 0.5);
    assert_eq!(v["exact"]["sigma"], "1/2");
}

#[test]
fn radius_sweep_reaches_zero_at_the_fisher_radius() {
    let f = fixture("semicircular1.json");
    let out = run(&["sweep-radius", "--model", f.to_str().unwrap(), "--radii", "0.25,0.5,1,2"]);
    assert!(out.status.success());
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 4);
    for (r, v, _) in rows {
        if r >= 1.0 {
            assert!(v.abs() < 1e-8, "R = {r}: {v}");
        } else {
            assert!((v - (1.0 - r)).abs() < 1e-8, "R = {r}: {v}");
        }
    }
}

#[test]
fn sigma_exact_for_a_matrix_algebra() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m2.json");
    std::fs::write(
        &model,
        r#"{"type": "matrix", "blocks": [{"size": 2, "weight": 1}],
            "generators": [[[[1, 0], [0, -1]]], [[[0, 1], [1, 0]]]]}"#,
    )
    .unwrap();
    let csv = dir.path().join("trail.csv");
    let v = json_of(&run(&[
        "sigma-exact",
        "--model",
        model.to_str().unwrap(),
        "--d",
        "3",
        "--csv",
        csv.to_str().unwrap(),
    ]));
    assert_eq!(v["mode"], "exact_fd");
    assert!((v["sigma"].as_f64().unwrap() - 0.75).abs() < 1e-9);
    let rows = csv_rows(&std::fs::read_to_string(csv).unwrap());
    assert_eq!(rows.iter().map(|r| r.0 as usize).collect::<Vec<_>>(), [1, 2, 3]);
}

#[test]
fn discrepancy_of_the_conjugate_variable_vanishes() {
    let f = fixture("semicircular2.json");
    let v = json_of(&run(&["discrepancy", "--model", f.to_str().unwrap(), "--xi", "(t1, t2)"]));
    assert!(v["value"].as_f64().unwrap().abs() < 1e-8);
    let zero = json_of(&run(&["discrepancy", "--model", f.to_str().unwrap(), "--xi", "(0, 0)"]));
    assert!((zero["value"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-8, "{zero}");
}

#[test]
fn alpha_from_a_saved_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let f = fixture("semicircular1.json");
    let out = run(&[
        "sweep-radius",
        "--model",
        f.to_str().unwrap(),
        "--radii",
        "0.25,0.5,0.75,1,1.5,2",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = json_of(&run(&["alpha", "--sweep", csv.to_str().unwrap()]));
    assert_eq!(v["alpha_is_neg_infinity"], true);
    let tp = fixture("twopoint.json");
    let v = json_of(&run(&["alpha", "--model", tp.to_str().unwrap(), "--radii", "0.5,1,2,4", "--dxi", "2"]));
    assert_eq!(v["alpha"].as_f64().unwrap(), 0.0, "{v}");
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("semicircular2.json");
    let mut outs = Vec::new();
    for t in ["1", "4"] {
        let p = dir.path().join(format!("r{t}.json"));
        let out = run(&[
            "bounded",
            "--model",
            f.to_str().unwrap(),
            "--radii",
            "0.5,1,1.5",
            "--dxi",
            "2",
            "--threads",
            t,
            "--seed",
            "7",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        outs.push(std::fs::read(p).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
    let v: Value = serde_json::from_slice(&outs[0]).unwrap();
    assert_eq!(v["seed"], 7);
}

#[test]
fn validation_failures_exit_with_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["closed-form", "nope"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"type": "measure", "atoms": [[0, "1/2"], [1, "1/3"]]}"#).unwrap();
    let out = run(&["irregularity", "--model", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("atoms"));

    let f = fixture("semicircular1.json");
    let out = run(&["discrepancy", "--model", f.to_str().unwrap(), "--xi", "(t2)"]);
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .env("FREE_STEIN_CAP", "3")
        .args(["irregularity", "--model", f.to_str().unwrap(), "--dxi", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ill_conditioning_exits_with_three_and_keeps_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let f = fixture("semicircular1.json");
    let out = run(&[
        "irregularity",
        "--model",
        f.to_str().unwrap(),
        "--max-condition",
        "1",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap();
    assert!((v["sigma"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn closed_form_parameters() {
    let v = json_of(&run(&[
        "closed-form",
        "graph",
        "--params",
        r#"{"vertices": ["1/2", "1/2"], "edges": [[1, 2]]}"#,
    ]));
    assert_eq!(v["identity_holds"], true);
    let v = json_of(&run(&["closed-form", "radulescu", "--params", r#"{"pairs": [{"tau_e": "1/2", "tau_f": "1/2", "equal": true}]}"#]));
    assert_eq!(v["t"]["exact"], "5/4");
    let list = json_of(&run(&["closed-form", "list"]));
    assert!(list["closed_forms"].as_array().unwrap().len() >= 9);
}
