//! End-to-end runs of the binary: file formats, exit codes, determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_proxlab"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).expect("file exists")).expect("valid json")
}

#[test]
fn generate_then_measure_tight_member() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["generate", "lowerbound", "--delta", "3", "--n", "2", "--k", "0", "--out", "lb.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let file = json(&dir.path().join("lb.json"));
    assert_eq!(file["schema_version"], 1);
    assert_eq!(file["a"][1], serde_json::json!(["2", "3"]));
    assert!(file["t"].is_array(), "witnesses included");

    let out = run(&["measure", "lb.json"], dir.path());
    assert!(out.status.success(), "all bounds hold: exit 0");
    let report = json(&dir.path().join("lb.report.json"));
    assert_eq!(report["proximity"], "1");
    assert_eq!(report["bound_main"], "3");
    assert_eq!(report["flag_main"], "strict");
    assert_eq!(report["bound_tu"], "2");
    assert_eq!(report["delta_table"], serde_json::json!(["3", "3"]));
}

#[test]
fn generated_files_are_byte_stable_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let out = run(
            &[
                "generate", "random", "--n", "3", "--m", "8", "--bound", "3", "--seed", "7",
                "--out", name,
            ],
            dir.path(),
        );
        assert!(out.status.success());
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b, "same seed must produce identical bytes");
}

#[test]
fn parameter_and_parse_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["generate", "lowerbound", "--delta", "2", "--n", "2", "--k", "0", "--out", "no.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2), "delta below 3 is rejected");
    assert!(!dir.path().join("no.json").exists());

    std::fs::write(dir.path().join("bad.json"), "not json").unwrap();
    let out = run(&["measure", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infeasible_and_capped_runs_use_their_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("infeasible.json"),
        r#"{"schema_version":1,"a":[["1"],["-1"]],"b":["-1","0"],"c":["1"]}"#,
    )
    .unwrap();
    let out = run(&["measure", "infeasible.json"], dir.path());
    assert_eq!(out.status.code(), Some(3));

    let out = run(
        &["generate", "lowerbound", "--delta", "4", "--n", "3", "--k", "1", "--out", "lb.json"],
        dir.path(),
    );
    assert!(out.status.success());
    let out = run(&["measure", "lb.json", "--cap-box", "2"], dir.path());
    assert_eq!(out.status.code(), Some(4), "box cap is an error, not an approximation");
}

#[test]
fn walk_uses_default_blocks_and_certifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["generate", "lowerbound", "--delta", "4", "--n", "4", "--k", "2", "--out", "lb.json"],
        dir.path(),
    );
    assert!(out.status.success());
    let out = run(&["walk", "lb.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let record = json(&dir.path().join("lb.walk.json"));
    assert_eq!(record["d_seq"], serde_json::json!([2, 2]));
    assert_eq!(record["certified"], true);

    // mismatched block sum is a parameter error
    let out = run(&["walk", "lb.json", "--d-seq", "3"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lift_and_ray_decomposition_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "generate", "sdm", "--n", "2", "--m", "5", "--delta", "3", "--seed", "5", "--out",
            "sdm.json",
        ],
        dir.path(),
    );
    assert!(out.status.success());

    let out = run(&["lift", "sdm.json", "--rows", "0", "--alpha", "0,1"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lifted = json(&dir.path().join("sdm.lift.json"));
    assert_eq!(lifted["verified"], true);
    assert_eq!(lifted["d"], 1);

    let out = run(&["decompose-rays", "sdm.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rays = json(&dir.path().join("sdm.rays.json"));
    assert_eq!(rays["integral_partial_sums"], serde_json::json!([]));
}

#[test]
fn sweep_aggregates_and_exports_csv() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.json"), "{}").unwrap();
    let out = run(&["sweep", "empty.json"], dir.path());
    assert!(out.status.success(), "empty config is a no-op success");

    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{
            "random": [{"n": 2, "m": 5, "count": 4, "seed": 9}],
            "lower_bound": [{"delta": 3, "n": 2, "k": 0}],
            "sdm": [{"n": 2, "m": 4, "delta": 2, "count": 2, "seed": 1}]
        }"#,
    )
    .unwrap();
    let out = run(&["sweep", "cfg.json", "--csv", "cfg.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let agg = json(&dir.path().join("cfg.sweep.json"));
    assert_eq!(agg["instances"], 7);
    assert_eq!(agg["violations"], serde_json::json!([]));
    let csv = std::fs::read_to_string(dir.path().join("cfg.csv")).unwrap();
    assert_eq!(csv.lines().count(), 8, "header plus one row per instance");
    assert!(csv.lines().nth(1).unwrap().starts_with("lowerbound-d3-n2-k0,1,1"));
}
