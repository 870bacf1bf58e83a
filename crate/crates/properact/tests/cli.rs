//! End-to-end tests of the command-line interface: goldens, exit codes,
//! and report determinism.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_properact"))
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("properact-test-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

const PROPER_PROBLEM: &str = r#"{
  "ambient": {"kind": "SL", "n": 3},
  "h1": {"variant": "OneParameter", "x": [[1,0,0],[0,1,0],[0,0,-2]]},
  "h2": {"variant": "OneParameter", "x": [[1,0,0],[0,-1,0],[0,0,0]]}
}"#;

const NOT_PROPER_PROBLEM: &str = r#"{
  "ambient": {"kind": "SL", "n": 2},
  "h1": {"variant": "OneParameter", "x": [[1,0],[0,-1]]},
  "h2": {"variant": "OneParameter", "x": [[1,0],[0,-1]]}
}"#;

#[test]
fn project_prints_cartan_projection() {
    let out = bin()
        .args(["project", "--matrix", "[[1,1],[0,1]]"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.trim(), "(0.4812, -0.4812)");
}

#[test]
fn decide_proper_exits_zero_with_report() {
    let problem = write_temp("proper.json", PROPER_PROBLEM);
    let report = std::env::temp_dir().join(format!("properact-report-{}.json", std::process::id()));
    let out = bin()
        .args(["decide", "--problem"])
        .arg(&problem)
        .arg("--report")
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("verdict: Proper"), "{stdout}");
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(parsed["verdict"]["kind"], "Proper");
    assert!(parsed["verdict"]["gap"].as_f64().unwrap() > 0.1);
    std::fs::remove_file(report).ok();
}

#[test]
fn decide_not_proper_exits_one() {
    let problem = write_temp("notproper.json", NOT_PROPER_PROBLEM);
    let out = bin().args(["decide", "--problem"]).arg(&problem).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("verdict: NotProper"), "{stdout}");
    assert!(stdout.contains("witness"), "{stdout}");
}

#[test]
fn singular_generator_exits_three_naming_entry() {
    let problem = write_temp(
        "singular.json",
        r#"{
          "ambient": {"kind": "SL", "n": 2},
          "h1": {"variant": "Discrete", "generators": [[[1,0],[0,0]]]},
          "h2": {"variant": "OneParameter", "x": [[1,0],[0,-1]]}
        }"#,
    );
    let out = bin().args(["decide", "--problem"]).arg(&problem).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("h1"), "{stderr}");
    assert!(stderr.contains("generator 0"), "{stderr}");
    assert!(stderr.contains("singular"), "{stderr}");
}

#[test]
fn malformed_problem_exits_three() {
    let problem = write_temp("malformed.json", "{ not json");
    let out = bin().args(["decide", "--problem"]).arg(&problem).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reports_are_deterministic_modulo_timestamp() {
    let problem = write_temp("det.json", PROPER_PROBLEM);
    let mut reports = Vec::new();
    for i in 0..2 {
        let report =
            std::env::temp_dir().join(format!("properact-det-{}-{i}.json", std::process::id()));
        let out = bin()
            .args(["decide", "--problem"])
            .arg(&problem)
            .arg("--report")
            .arg(&report)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("timestamp");
        reports.push(serde_json::to_string(&v).unwrap());
        std::fs::remove_file(report).ok();
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn equiv_verdicts_and_exit_codes() {
    let problem = write_temp("equiv.json", NOT_PROPER_PROBLEM);
    let out = bin().args(["equiv", "--problem"]).arg(&problem).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("Equivalent"));

    let problem = write_temp("equiv2.json", PROPER_PROBLEM);
    let out = bin().args(["equiv", "--problem"]).arg(&problem).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn rank_report() {
    let problem = write_temp("rank.json", PROPER_PROBLEM);
    let out = bin().args(["rank", "--problem"]).arg(&problem).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("ambient rank: 2"), "{stdout}");
    assert!(stdout.contains("subgroup rank: 1"), "{stdout}");
}

#[test]
fn cross_validate_agrees() {
    let problem = write_temp("cv.json", NOT_PROPER_PROBLEM);
    let out = bin()
        .args(["cross-validate", "--problem"])
        .arg(&problem)
        .args(["--word-length", "3", "--rho", "0.2", "--mesh", "0.25"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("pass"), "{stdout}");
}

#[test]
fn sweeps_pass_quickly() {
    for (cmd, samples) in [
        ("cat0-verify", "100"),
        ("property-s", "100"),
        ("quotient-verify", "50"),
        ("suite", "100"),
    ] {
        let out = bin().args([cmd, "--samples", samples]).output().unwrap();
        assert_eq!(
            out.status.code(),
            Some(0),
            "{cmd}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn unknown_subcommand_exits_three() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn help_exits_zero() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}
