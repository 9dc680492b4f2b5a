//! End-to-end tests for the command-line binary: exit codes, output
//! formats, certificate round-trips, and agreement with the stored
//! golden certificates.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use lacpoly::pipeline::{analyze_family, Budgets, FamilyInput, FamilyInputDoc};

/// Absolute path to the shared fixture directory.
fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Runs the binary with the given arguments and captures its output.
fn lacpoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lacpoly"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Exit code of a finished invocation.
fn code(out: &Output) -> i32 {
    out.status.code().expect("process exited")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// A fresh scratch directory for one test.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lacpoly-cli-{name}-{}", std::process::id()));
    fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

/// Loads a family fixture by file stem.
fn load_fixture(stem: &str) -> FamilyInput {
    let text = fs::read_to_string(fixtures().join(format!("{stem}.json"))).unwrap();
    let doc: FamilyInputDoc = serde_json::from_str(&text).unwrap();
    FamilyInput::from_doc(&doc).unwrap()
}

#[test]
fn analyze_writes_a_certificate_that_verifies_and_detects_tampering() {
    let dir = scratch("roundtrip");
    let cert = dir.join("ex2.cert.json");
    let input = fixtures().join("ex2.json");

    let out = lacpoly(&["analyze", input.to_str().unwrap(), "--out", cert.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.contains("verdict: product_of_irreducible_reciprocals_for_large_n"),
        "{text}"
    );

    let out = lacpoly(&["verify", cert.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("certificate verifies"));

    let tampered = fs::read_to_string(&cert).unwrap().replacen(
        "product_of_irreducible_reciprocals_for_large_n",
        "inconclusive",
        1,
    );
    let bad = dir.join("tampered.cert.json");
    fs::write(&bad, tampered).unwrap();
    let out = lacpoly(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("DOES NOT verify"));
}

#[test]
fn analyze_defaults_to_a_sibling_certificate_path() {
    let dir = scratch("default-out");
    let input = dir.join("fam.json");
    fs::copy(fixtures().join("ex2.json"), &input).unwrap();
    let out = lacpoly(&["analyze", input.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(dir.join("fam.cert.json").exists());
}

#[test]
fn tight_modulus_budget_is_reported_and_exits_inconclusive() {
    let dir = scratch("tight");
    let cert = dir.join("ex2.cert.json");
    let input = fixtures().join("ex2.json");
    let out = lacpoly(&[
        "analyze",
        input.to_str().unwrap(),
        "--out",
        cert.to_str().unwrap(),
        "--t-max",
        "3",
    ]);
    assert_eq!(code(&out), 2);
    let text = stdout(&out);
    assert!(text.contains("verdict: inconclusive"), "{text}");
    assert!(text.contains("skipped moduli: [4]"), "{text}");
}

#[test]
fn factoring_recovers_reciprocal_flags() {
    let out = lacpoly(&["factor", "x^5+x^4+1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("  (x^2+x+1)  reciprocal"), "{text}");
    assert!(text.contains("  (x^3-x+1)  non-reciprocal"), "{text}");

    let out = lacpoly(&["--json", "factor", "x^5+x^4+1"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["factors"].as_array().unwrap().len(), 2);
}

#[test]
fn family_members_factor_at_concrete_exponents() {
    let input = fixtures().join("ex3.json");
    let out = lacpoly(&["factor", "--family", input.to_str().unwrap(), "--n", "7"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("n = 7:"), "{text}");
    assert!(text.contains("(x+1)^2"), "{text}");
    assert!(text.contains("(x-1)^2"), "{text}");
    assert!(!text.contains("non-reciprocal"), "{text}");
}

#[test]
fn modulus_search_reports_scan_and_guarantee() {
    let out = lacpoly(&["find-k", "1", "5", "9", "14"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("scanned moduli"));

    let out = lacpoly(&["--json", "find-k", "1", "5", "9", "14"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["above_threshold"], serde_json::Value::Bool(false));
    assert_eq!(v["scan"]["total"], 1);
    assert_eq!(v["scan"]["first"][0], 5);

    // Exponents too large to scan and too short to guarantee: nothing to report.
    let out = lacpoly(&["find-k", "1", "2", "3", "4", "5", "6", "7", "200000001"]);
    assert_eq!(code(&out), 2);
    let text = stdout(&out);
    assert!(text.contains("below the guarantee threshold"), "{text}");
    assert!(text.contains("scan skipped"), "{text}");
}

#[test]
fn substitution_classifier_reports_all_moduli() {
    let input = fixtures().join("quartic.json");
    let out = lacpoly(&["capelli", input.to_str().unwrap(), "--n", "5"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("irreducible for every positive n"), "{text}");
    assert!(text.contains("at n = 5: irreducible"), "{text}");

    let out = lacpoly(&["--json", "capelli", input.to_str().unwrap(), "--n", "6"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["status"]["kind"], "irreducible_for_all_n");
    assert_eq!(v["reducible_at_n"], serde_json::Value::Bool(false));
}

#[test]
fn malformed_inputs_exit_with_an_error() {
    let out = lacpoly(&["factor", "x^^2"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("error:"));

    let out = lacpoly(&["find-k", "3", "2"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("strictly increasing"));

    let out = lacpoly(&["analyze", "/nonexistent/family.json"]);
    assert_eq!(code(&out), 1);

    let out = lacpoly(&["factor"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("either a polynomial"));
}

#[test]
fn golden_certificates_match_fresh_runs() {
    for stem in ["ex2", "ex3"] {
        let path = fixtures().join("golden").join(format!("{stem}.cert.json"));
        let golden: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(golden["version"], "v1");
        let input = load_fixture(stem);
        let cert = analyze_family(&input, &Budgets::default()).unwrap();
        let fresh = serde_json::to_value(&cert).unwrap();
        assert_eq!(fresh, golden["certificate"], "{stem} drifted from its golden certificate");
    }
}
