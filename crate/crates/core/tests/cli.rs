// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn relaxsched(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relaxsched")).args(args).env_remove("RELAXSCHED_BUDGET").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_is_reproducible() {
    for args in [&["generate", "yen", "--n", "6"][..], &["generate", "randomized-yen", "--n", "6", "--seed", "11", "--format", "json"], &["generate", "round-robin", "--n", "5", "--machine"]] {
        let (a, b) = (relaxsched(args), relaxsched(args));
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
    assert_ne!(
        relaxsched(&["generate", "randomized-yen", "--n", "6", "--seed", "1"]).stdout,
        relaxsched(&["generate", "randomized-yen", "--n", "6", "--seed", "2"]).stdout
    );
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    fs::write(&graph, "complete 5\n").unwrap();
    let good = dir.path().join("yen.txt");
    let out = relaxsched(&["generate", "yen", "--n", "5", "--output", path(&good)]);
    assert!(out.status.success() && out.stdout.is_empty());

    let out = relaxsched(&["validate", "--graph", path(&graph), "--schedule", path(&good)]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["valid"], true);
    assert_eq!(report["witness"], Value::Null);

    let bad = dir.path().join("rr1.txt");
    fs::write(&bad, relaxsched(&["generate", "round-robin", "--n", "5", "--rounds", "1"]).stdout).unwrap();
    let out = relaxsched(&["validate", "--graph", path(&graph), "--schedule", path(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    // Paths with increasing tails survive one round; the shortest that does not is (0,2,1,3).
    assert_eq!(json(&out)["witness"], serde_json::json!([0, 2, 1, 3]));

    let out = relaxsched(&["validate", "--graph", path(&graph), "--schedule", path(&good), "--budget", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["budget_exhausted"], true);

    let out = relaxsched(&["validate", "--graph", path(&dir.path().join("missing.txt")), "--schedule", path(&good)]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(relaxsched(&["validate", "--nonsense"]).status.code(), Some(3));
}

#[test]
fn reduce_then_validate() {
    let dir = tempfile::tempdir().unwrap();
    for (t, valid) in [("[1, 2, 1]", true), ("[1, 1, 2]", false)] {
        let instance = dir.path().join("inst.json");
        fs::write(&instance, format!(r#"{{"n": 2, "T": {t}}}"#)).unwrap();
        let out_dir = dir.path().join("out");
        let out = relaxsched(&["reduce", "--instance", path(&instance), "--out-dir", path(&out_dir), "--machine"]);
        assert!(out.status.success());
        assert!(out.stderr.is_empty());
        let manifest = json(&out);
        assert_eq!(manifest["vertex_count"], 5);
        assert_eq!(fs::read_to_string(out_dir.join("manifest.json")).unwrap().as_bytes(), &out.stdout[..]);
        let out = relaxsched(&["validate", "--graph", path(&out_dir.join("graph.txt")), "--schedule", path(&out_dir.join("schedule.txt"))]);
        assert_eq!(json(&out)["valid"], valid, "T = {t}");
        assert_eq!(out.status.code(), Some(if valid { 0 } else { 1 }));
    }
}

#[test]
fn run_exposes_missing_path() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    fs::write(&graph, "complete 3\n").unwrap();
    // 0/1 weights that make the path (0,2,1) the only zero-cost route to 1.
    let weights = dir.path().join("w.txt");
    fs::write(&weights, "0 1 1\n0 2 0\n1 0 1\n1 2 1\n2 0 1\n2 1 0\n").unwrap();
    let schedule = dir.path().join("s.txt");
    fs::write(&schedule, "2 1\n0 2\n0 1\n").unwrap();
    let out = relaxsched(&["run", "--graph", path(&graph), "--weights", path(&weights), "--schedule", path(&schedule)]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["distances"][1], 1);
    assert_eq!(report["exact_distances"][1], 0);
    assert_eq!(report["correct"], false);

    fs::write(&schedule, "0 2\n2 1\n").unwrap();
    let report = json(&relaxsched(&["run", "--graph", path(&graph), "--weights", path(&weights), "--schedule", path(&schedule)]));
    assert_eq!(report["correct"], true);

    fs::write(&weights, "0 1 1/2\n0 2 3\n1 0 1\n1 2 -2\n2 0 1\n2 1 1\n").unwrap();
    fs::write(&schedule, "0 1\n1 2\n0 2\n").unwrap();
    let report = json(&relaxsched(&["run", "--graph", path(&graph), "--weights", path(&weights), "--schedule", path(&schedule)]));
    assert_eq!(report["distances"], serde_json::json!([0, "1/2", "-3/2"]));

    fs::write(&weights, "0 1 1\n0 2 1\n1 0 1\n1 2 -3\n2 0 1\n2 1 1\n").unwrap();
    let out = relaxsched(&["run", "--graph", path(&graph), "--weights", path(&weights), "--schedule", path(&schedule)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["negative_cycle"], serde_json::json!([0, 1, 2]));
}

#[test]
fn audit_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let schedule = dir.path().join("yen8.json");
    relaxsched(&["generate", "yen", "--n", "8", "--format", "json", "--output", path(&schedule)]);
    let out = relaxsched(&["audit-lowerbound", "--n", "8", "--schedule", path(&schedule)]);
    assert_eq!(out.status.code(), Some(0));
    let audit = json(&out);
    assert_eq!(audit["all_universal"], true);
    assert_eq!(audit["certified_lower_bound"], 70);
    assert_eq!(audit["schedule_length"], 224);

    let out = relaxsched(&["bench", "--n-min", "4", "--n-max", "6", "--generators", "round-robin,yen,randomized-yen", "--verify", "--seed", "3"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 1 + 9);
    assert!(csv.lines().skip(1).all(|row| row.contains(",true,")));
}
