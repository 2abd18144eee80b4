use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use finmodel::k1::{generated_substructure, InstanceSpec, K1Structure, PreValue};
use finmodel::kdim::{KConfiguration, KrStructure};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_finmodel"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write<T: serde::Serialize>(name: &str, v: &T) -> PathBuf {
    let p = scratch(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn minimal_structure_checks() {
    let p = write("minimal.json", &K1Structure::minimal(6));
    let out = run(&["check", "--class", "k1", s(&p)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn failing_check_exits_one() {
    let mut m = K1Structure::minimal(2);
    m.p0 = vec![0];
    m.g1 = vec![0];
    let p = write("bad.json", &m);
    let out = run(&["check", "--class", "kminus1", s(&p), "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rep["items"].as_array().unwrap().iter().any(|i| i["passed"] == false));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["check", "--class", "k1", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(run(&["check", "--class", "nope", "x.json"]).status.code(), Some(2));
}

#[test]
fn fixtures_directory_is_searched() {
    let p = write("fixture_min.json", &K1Structure::minimal(3));
    let out = bin().env("FINMODEL_FIXTURES", p.parent().unwrap()).args(["check", "--class", "k1", "fixture_min.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn survey_matches_frozen_table() {
    let out = run(&["survey", "--r", "1", "--k", "2", "--bound", "3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let fixture = include_str!("fixtures/survey_r1_k2_b3.csv");
    assert_eq!(String::from_utf8(out.stdout).unwrap(), fixture);
}

#[test]
fn k1_amalgam_round_trips_through_check() {
    let spec = InstanceSpec {
        trunc_n: 2,
        designated: 2,
        base_cells: 2,
        n_star: 1,
        pre: vec![vec![PreValue { trace: 1, cells: 1 }]],
    };
    let m = spec.build();
    let (n1, _) = generated_substructure(&m, &[0].into(), &[].into());
    let triple = serde_json::json!({ "m1": m, "n1": n1, "n2": m });
    let p = write("triple.json", &triple);
    let out_file = scratch("amalgam.json");
    let out = run(&["amalgamate", "--class", "k1", s(&p), "--out", s(&out_file)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(run(&["check", "--class", "k1", s(&out_file)]).status.code(), Some(0));
}

fn discrete(ids: &[u32]) -> KrStructure {
    let mut m = KrStructure::with_universe(1, 2, ids.iter().copied());
    for t in m.tuples() {
        m.set_tuple(&t, 0, &[]);
    }
    m
}

#[test]
fn kr0_configuration_amalgamates() {
    let c = KConfiguration { parts: vec![discrete(&[0, 1]), discrete(&[1, 2])] };
    let p = write("config.json", &c);
    let out_file = scratch("kr_amalgam.json");
    let out = run(&["amalgamate", "--class", "kr0", s(&p), "--out", s(&out_file)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(run(&["check", "--class", "kr0", s(&out_file)]).status.code(), Some(0));
    let stacked = KConfiguration { parts: vec![discrete(&[0, 1]), discrete(&[0, 1])] };
    let p = write("stacked.json", &stacked);
    assert_eq!(run(&["amalgamate", "--class", "kr0", s(&p)]).status.code(), Some(1));
}

#[test]
fn ba_operations() {
    let p = write("ind.json", &serde_json::json!({
        "op": "independent", "atoms": 4,
        "ys": [{"len": 4, "bits": [0, 1]}, {"len": 4, "bits": [0, 2]}]
    }));
    assert_eq!(run(&["ba", s(&p)]).status.code(), Some(0));
    let p = write("dep.json", &serde_json::json!({
        "op": "independent", "atoms": 4,
        "ys": [{"len": 4, "bits": [0, 1]}, {"len": 4, "bits": [0, 1]}]
    }));
    assert_eq!(run(&["ba", s(&p)]).status.code(), Some(1));
    let p = write("basis.json", &serde_json::json!({ "op": "basis", "free": 2, "element": {"len": 4, "bits": [0, 3]} }));
    assert_eq!(run(&["ba", s(&p)]).status.code(), Some(0));
    let p = write("nobasis.json", &serde_json::json!({ "op": "basis", "free": 2, "element": {"len": 4, "bits": [0]} }));
    assert_eq!(run(&["ba", s(&p)]).status.code(), Some(1));
}

#[test]
fn structured_reports_are_byte_identical() {
    for args in [
        vec!["generic", "--format", "json"],
        vec!["generic", "--seed", "3", "--format", "json"],
        vec!["label", "--trunc-n", "3", "--seed", "9", "--format", "json"],
        vec!["survey", "--bound", "4", "--cap", "100", "--seed", "11", "--format", "json"],
        vec!["oracle", "--format", "json"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&a.stdout));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
