use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn blaschke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blaschke")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

const Z_SQUARED: &str = r#"{"label":"z2","phase":0.0,"zeros":[[0,0],[0,0]]}"#;

#[test]
fn analyze_reports_have_the_expected_keys() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "z2.json", Z_SQUARED);
    let out = blaschke(&["analyze", &f]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let reports = lines(&out);
    assert_eq!(reports.len(), 1);
    let r = &reports[0];
    for key in ["instance", "order", "verdict", "witnesses", "subspaces", "checks", "config"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert_eq!(r["order"], 2);
    for c in r["checks"].as_array().unwrap() {
        for key in ["check_id", "paper_anchor", "residual", "tolerance", "passed"] {
            assert!(c.get(key).is_some(), "check is missing {key}");
        }
        assert!(c.get("runtime_ms").is_none());
    }
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "two.jsonl",
        "{\"phase\":0.4,\"zeros\":[[0.2,0.1],[-0.3,0.4],[0.1,-0.5]]}\n{\"phase\":0.0,\"zeros\":[[0.5,0],[0.5,0]]}\n",
    );
    let a = blaschke(&["verify", &f, "--seed", "9"]);
    let b = blaschke(&["verify", &f, "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(lines(&a).len(), 2);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "z2.json", Z_SQUARED);
    let target = dir.path().join("out.jsonl");
    let to_file = blaschke(&["analyze", &f, "--output", target.to_str().unwrap()]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    let to_stdout = blaschke(&["analyze", &f]);
    assert_eq!(fs::read(&target).unwrap(), to_stdout.stdout);
    assert!(!dir.path().join("out.jsonl.tmp").exists());
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let on_circle = write(dir.path(), "c.json", r#"{"phase":0,"zeros":[[1.0,0.0]]}"#);
    let out = blaschke(&["analyze", &on_circle]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let garbage = write(dir.path(), "g.json", "{\"phase\":0,\"zeros\":[[0.1,0.0]]}\n{not json\n");
    let out = blaschke(&["verify", &garbage]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let unknown = write(dir.path(), "u.json", r#"{"phase":0,"zeros":[],"extra":1}"#);
    assert_eq!(blaschke(&["analyze", &unknown]).status.code(), Some(2));

    assert_eq!(blaschke(&["analyze", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(blaschke(&["gen", "--family", "nope", "--count", "2"]).status.code(), Some(2));
    assert_eq!(blaschke(&["lattice"]).status.code(), Some(2));
}

#[test]
fn lattice_counts() {
    let out = blaschke(&["lattice", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &lines(&out)[0];
    assert_eq!(r["count"], 14);
    assert_eq!(r["expected"], 14);
}

#[test]
fn gen_is_seeded_and_feeds_analyze() {
    let a = blaschke(&["gen", "--family", "equiv_zn", "--count", "3", "--seed", "5"]);
    let b = blaschke(&["gen", "--family", "equiv_zn", "--count", "3", "--seed", "5"]);
    let c = blaschke(&["gen", "--family", "equiv_zn", "--count", "3", "--seed", "6"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);

    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "eq.jsonl", &String::from_utf8(a.stdout).unwrap());
    let out = blaschke(&["analyze", &f]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for r in lines(&out) {
        let v = r["verdict"].as_str().unwrap();
        assert!(v == "reducible_zn" || v == "case_i", "{v}");
    }
}

#[test]
fn probe_agrees_on_z_cubed() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "z3.json", r#"{"phase":0,"zeros":[[0,0],[0,0],[0,0]]}"#);
    let out = blaschke(&["probe", &f]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = &lines(&out)[0];
    assert!(r.get("probe").is_some());
    assert!(r["checks"].as_array().unwrap().iter().any(|c| c["check_id"] == "commutant_dimension"));
}

#[test]
fn batch_writes_reports_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.jsonl", &format!("{Z_SQUARED}\n{{\"phase\":1.0,\"zeros\":[[0.3,0.2]]}}\n"));
    write(dir.path(), "b.json", r#"{"phase":0,"zeros":[[2.0,0.0]]}"#);
    write(dir.path(), "ignored.txt", "not an instance");
    let out_dir = dir.path().join("reports");
    let out = blaschke(&["batch", dir.path().to_str().unwrap(), "--mode", "analyze"]);
    // The malformed file is an input error; the rest still run.
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("a-0000.json").exists());
    assert!(out_dir.join("a-0001.json").exists());
    let summary: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["instances"], 2);
    assert_eq!(summary["reports"], 2);
    assert_eq!(summary["errors"].as_array().unwrap().len(), 1);
    let leftovers: Vec<_> = fs::read_dir(&out_dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn batch_of_valid_instances_passes() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "z2.json", Z_SQUARED);
    let out_dir = dir.path().join("out");
    let out = blaschke(&["batch", dir.path().to_str().unwrap(), "--output", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["verdicts"]["reducible_zn"], 1);
    assert!(summary["failed_checks"].as_object().unwrap().is_empty());
}
