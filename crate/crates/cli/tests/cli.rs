use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_triad-workbench"));
    cmd.env_remove("TRIAD_WORKBENCH_OUT_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

const GOLDEN_ARGS: [&str; 13] = [
    "check", "--example", "r3-standard", "--c", "0", "--points", "1", "--seed", "7", "--samples", "2", "--format", "json",
];

#[test]
fn report_matches_golden_file() {
    let out = run(&GOLDEN_ARGS);
    let path = golden_path("r3-standard-seed7.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &out.stdout).unwrap();
    }
    let expected = std::fs::read(&path).expect("golden file present; regenerate with UPDATE_GOLDEN=1");
    assert_eq!(String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&expected));
}

#[test]
fn reports_are_byte_stable_across_runs_and_thread_counts() {
    let args = ["check", "--example", "r5-perturbed-j", "--c=-1,0,1", "--points", "4", "--seed", "3", "--negative-controls"];
    let a = bin().args(args).env("RAYON_NUM_THREADS", "1").output().unwrap();
    let b = bin().args(args).env("RAYON_NUM_THREADS", "4").output().unwrap();
    let c = bin().args(args).output().unwrap();
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn exit_codes_follow_the_contract() {
    let ok = run(&["check", "--example", "r5-standard", "--c", "0", "--points", "2"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));

    // Negative controls fail as required and do not affect the exit code.
    let controls = run(&["check", "--example", "r5-perturbed-j", "--c=-1,0,1", "--points", "2", "--negative-controls"]);
    assert_eq!(controls.status.code(), Some(0), "{}", String::from_utf8_lossy(&controls.stderr));

    // The scaling comparison fails on every triad that runs it.
    let scaling = run(&["check", "--example", "r3-standard", "--c", "0", "--points", "2"]);
    assert_eq!(scaling.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&scaling.stderr).contains("scaling: failed"));

    for bad in [
        vec!["check", "--example", "r3-standard", "--c="],
        vec!["check", "--example", "no-such-triad"],
        vec!["check", "--example", "r3-standard", "--points", "0"],
        vec!["check", "--example", "r3-standard", "--format", "xml"],
        vec!["check", "--example", "r3-standard", "--mode", "fd", "--fd-step", "-1"],
        vec!["describe-check", "no-such-check"],
    ] {
        assert_eq!(run(&bad).status.code(), Some(2), "{bad:?}");
    }
}

#[test]
fn negative_controls_are_reported_as_detected() {
    let out = run(&["check", "--example", "r5-perturbed-j", "--c", "0", "--points", "2", "--negative-controls"]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = &report["summary"]["checks"];
    for name in ["control-wrong-c", "control-levi-civita", "control-b1-sign-flip", "control-cr-defect"] {
        assert_eq!(checks[name]["ok"], Value::Bool(true), "{name}");
        assert_eq!(checks[name]["detected"], checks[name]["records"], "{name}");
    }
}

#[test]
fn csv_has_one_row_per_check_and_point() {
    let per_point = |points: &str| {
        let out = run(&["check", "--example", "t3-tight", "--c", "0,1", "--points", points, "--format", "csv", "--samples", "2"]);
        csv::Reader::from_reader(out.stdout.as_slice()).records().count()
    };
    let (one, three) = (per_point("1"), per_point("3"));
    assert!(one > 0);
    assert_eq!(three, 3 * one);
}

#[test]
fn json_round_trips_residuals_at_twelve_digits() {
    let out = run(&["check", "--example", "r3-perturbed-j", "--c", "0", "--points", "2", "--samples", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let report: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["schema_version"], Value::from(1));
    assert_eq!(report["connections"][0]["label"], Value::from("contact triad connection"));
    let records = report["records"].as_array().unwrap();
    assert_eq!(report["summary"]["records"].as_u64().unwrap() as usize, records.len());
    for r in records {
        let residual = r["residual"].as_f64().unwrap();
        let printed = format!("\"residual\": {}", contact_triad::report::format_float(residual));
        assert!(text.contains(&printed), "{printed}");
        assert!(!r["anchor"].as_str().unwrap().is_empty());
    }
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["check", "--example", "t3-tight", "--c", "0", "--points", "1", "--seed", "5", "--samples", "2"])
        .env("TRIAD_WORKBENCH_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read(dir.path().join("t3-tight-seed5.json")).unwrap();
    serde_json::from_slice::<Value>(&written).unwrap();

    let explicit = dir.path().join("nested/report.csv");
    let out = run(&[
        "check", "--example", "t3-tight", "--c", "0", "--points", "1", "--samples", "2", "--format", "csv", "--out",
        explicit.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(explicit).unwrap().starts_with("name,c,"));
}

#[test]
fn catalog_listing_and_check_descriptions() {
    let list = String::from_utf8(run(&["list-examples"]).stdout).unwrap();
    for id in ["r3-standard", "r9-standard", "t3-tight", "r3-perturbed-j", "r5-perturbed-j"] {
        assert!(list.lines().any(|l| l.starts_with(id)), "{id}");
    }
    let out = run(&["describe-check", "axiom-5c"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("∇_{JY}X_λ + J∇_Y X_λ = cY"));
    let control = String::from_utf8(run(&["describe-check", "control-b1-sign-flip"]).stdout).unwrap();
    assert!(control.contains("negative control"));
}

#[test]
fn fd_mode_passes_on_a_perturbed_triad() {
    let out = run(&["check", "--example", "r3-perturbed-j", "--c", "0", "--points", "2", "--mode", "fd", "--samples", "2"]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["engine"]["mode"], Value::from("fd"));
    let failing: Vec<&str> =
        report["summary"]["failing_checks"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(failing, vec!["scaling"]);
}
