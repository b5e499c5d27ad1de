//! End-to-end runs of the `opct` binary: exit codes, pipelines, formats,
//! and witness re-validation.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn opct() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opct"))
}

fn fixture(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    root.join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    opct().args(args).output().expect("spawn opct")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn check_exit_codes_follow_verdicts() {
    // holds -> 0
    let out = run(&[
        "check",
        "--predicate",
        "predetermined",
        &fixture("f6.poset"),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    // fails -> 1, with the exact witness pair
    let out = run(&[
        "check",
        "--predicate",
        "graded",
        "--json",
        &fixture("f3.poset"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["schema"], "opct-report-v1");
    assert_eq!(
        report["verdicts"][0]["witness"]["edges"][0],
        serde_json::json!(["c3b", "c1b"])
    );
    // unknown -> 2: atomhood of the two-lane poset's b-column is open
    let out = run(&[
        "check",
        "--predicate",
        "prime-element",
        "--element",
        "b2",
        &fixture("f5.poset"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    // usage -> 3
    let out = run(&["check", "--predicate", "nope", &fixture("f1.poset")]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["check", "--predicate", "graded", "missing.poset"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn generate_pipes_into_check() {
    let mut gen = opct()
        .args(["generate", "arc", "--depth", "5"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut check = opct()
        .args(["check", "--predicate", "branching", "-"])
        .stdin(Stdio::from(gen.stdout.take().unwrap()))
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let status = check.wait().unwrap();
    gen.wait().unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn oracle_reports_classifications() {
    let out = run(&["oracle", "--json", &fixture("f1.poset")]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let sels = report["data"]["minimal_selectors"].as_array().unwrap();
    assert_eq!(sels.len(), 2);
}

#[test]
fn dot_export_is_ranked_and_deterministic() {
    let out1 = run(&["dot", &fixture("f6.poset")]);
    let out2 = run(&["dot", &fixture("f6.poset")]);
    assert_eq!(stdout(&out1), stdout(&out2));
    let text = stdout(&out1);
    assert!(text.contains("rank=same"));
    // two downward edges per node below the top
    assert!(text.contains("\"p1_0\" -> \"p2_0\";"));
}

#[test]
fn round_trip_through_files() {
    let dir = std::env::temp_dir().join("opct-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("circle.poset");
    let out = run(&[
        "generate",
        "circle",
        "--depth",
        "3",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&[
        "check",
        "--predicate",
        "connectivity",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn verify_witness_round_trip() {
    let dir = std::env::temp_dir().join("opct-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let report_path = dir.join("f3-graded.json");
    let out = run(&[
        "check",
        "--predicate",
        "graded",
        "--json",
        &fixture("f3.poset"),
    ]);
    std::fs::File::create(&report_path)
        .unwrap()
        .write_all(out.stdout.as_slice())
        .unwrap();
    let out = run(&[
        "verify-witness",
        report_path.to_str().unwrap(),
        &fixture("f3.poset"),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    // tampering with the witness gets caught
    let tampered = stdout(&run(&[
        "check",
        "--predicate",
        "graded",
        "--json",
        &fixture("f3.poset"),
    ]))
    .replace("c3b", "c3a");
    let bad_path = dir.join("f3-tampered.json");
    std::fs::write(&bad_path, tampered).unwrap();
    let out = run(&[
        "verify-witness",
        bad_path.to_str().unwrap(),
        &fixture("f3.poset"),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn stars_and_spectrum_commands() {
    let out = run(&[
        "stars",
        "--element",
        "p2_1",
        "--cap-level",
        "2",
        &fixture("f6.poset"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("p2_1"));

    let out = run(&["spectrum", "enumerate", &fixture("f1.poset")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 2);

    // identical threads denote the same point; the a-column is a thread
    let out = run(&[
        "spectrum",
        "equal",
        "--thread-a",
        "a0,a1,a2,a3,a4,a5,a6",
        "--thread-b",
        "a0,a1,a2,a3,a4,a5,a6",
        &fixture("f5.poset"),
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn gradify_back_and_forth_pipeline() {
    let dir = std::env::temp_dir().join("opct-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let sub = dir.join("f5copy.poset");
    std::fs::copy(fixture("f5.poset"), &sub).unwrap();
    let grad = dir.join("f5-grad.poset");
    let stages = dir.join("f5-stages.refiner");
    let out = run(&[
        "generate",
        "gradify",
        "--depth",
        "0",
        "--of",
        sub.to_str().unwrap(),
        "-o",
        grad.to_str().unwrap(),
        "--emit-refiner",
        stages.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = run(&[
        "refiner",
        "back-and-forth",
        grad.to_str().unwrap(),
        sub.to_str().unwrap(),
        stages.to_str().unwrap(),
        "--depth",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}
