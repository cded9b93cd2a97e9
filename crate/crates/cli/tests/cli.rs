use std::process::{Command, Output};

use sosdeg::cones::{SosOutcome, SosStatus};
use sosdeg::polytope::{ClassificationReport, PosSos};
use sosdeg::witness::{certify_not_sos, WitnessReport};
use sosdeg_cli::{AmgmReport, DensityReport, EpsilonReport, HStarReport, NormalReport};

fn sosdeg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sosdeg")).args(args).output().expect("binary runs")
}

fn ok_json<T: serde::de::DeserializeOwned>(args: &[&str]) -> T {
    let out = sosdeg(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report parses")
}

const TWICE_TRIANGLE: &str = r#"{"ambient_rank":2,"vertices":[[0,0],[2,0],[0,2]]}"#;
const HIGASHITANI: &str = r#"{"ambient_rank":5,"vertices":[[0,0,0,0,0],[1,0,0,0,0],[0,1,0,0,0],[0,0,1,0,0],[0,0,0,1,0],[1,1,2,2,3]]}"#;
const REEVE: &str = "[[0,0,0],[1,0,0],[0,1,0],[1,1,5]]";

#[test]
fn classify_twice_triangle() {
    let r: ClassificationReport = ok_json(&["classify", "--input", TWICE_TRIANGLE]);
    assert_eq!(r.pos_equals_sos, PosSos::Equal);
    assert!(r.h2_zero && r.two_normal);
}

#[test]
fn hstar_with_oracle() {
    let r: HStarReport = ok_json(&["hstar", "--input", HIGASHITANI, "--oracle"]);
    assert_eq!(r.coefficients, vec![1, 0, 0, 2, 0, 0]);
    assert_eq!(r.degree, 3);
    assert!(r.oracle.unwrap().agrees);
}

#[test]
fn normal_reports_counterexample() {
    let r: NormalReport = ok_json(&["normal", "--input", REEVE, "--k", "2", "--oracle"]);
    assert!(!r.normal);
    assert!(r.counterexample.is_some());
    assert!(r.oracle.unwrap().agrees);
    let r: NormalReport = ok_json(&["normal", "--input", TWICE_TRIANGLE]);
    assert!(r.normal);
}

#[test]
fn density_and_amgm() {
    let r: DensityReport = ok_json(&["density", "--input", "[[0,0],[2,0],[0,2],[2,2]]"]);
    assert_eq!(r.sublattice_index, "1");
    let r: AmgmReport = ok_json(&["amgm", "--input", REEVE]);
    assert!(!r.two_normal);
    assert_eq!(r.witness.unwrap().len(), 5);
    assert!(r.obstruction.is_some());
}

#[test]
fn epsilon_of_models() {
    let r: EpsilonReport = ok_json(&["epsilon", "--input", r#"{"veronese":{"n":2,"d":3}}"#]);
    assert_eq!((r.epsilon, r.dim_r1, r.dim_r2), (1, 10, 28));
    let r: EpsilonReport = ok_json(&["epsilon", "--input", TWICE_TRIANGLE]);
    assert_eq!(r.epsilon, 0);
    assert!(r.minimal_degree);
}

#[test]
fn sos_check_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("req.json");
    // (x + y)^2 on the conic
    std::fs::write(&path, r#"{"model":{"veronese":{"n":1,"d":2}},"form":[1,2,1,0,0]}"#).unwrap();
    let r: SosOutcome = ok_json(&["sos-check", "--input", path.to_str().unwrap()]);
    assert_eq!(r.status, SosStatus::Certificate);
    let out = dir.path().join("out.json");
    let status = sosdeg(&["sos-check", "--input", path.to_str().unwrap(), "--tol", "1e-6", "--output", out.to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(0));
    let back: SosOutcome = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(back.options.feas_tol, 1e-6);
}

#[test]
fn witness_is_certified_and_reproducible() {
    let args = ["witness", "--d", "3", "--seed", "7", "--samples", "20000"];
    let a = sosdeg(&args);
    let b = sosdeg(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report: WitnessReport = serde_json::from_slice(&a.stdout).unwrap();
    assert!(report.certified_not_sos);
    assert!(certify_not_sos(&report));
    assert_ne!(report.sos_check.unwrap().status, SosStatus::Certificate);
}

#[test]
fn validation_errors_exit_with_two() {
    for args in [
        vec!["hstar", "--input", "{not json"],
        vec!["hstar", "--input", "/nonexistent/polytope.json"],
        vec!["classify", "--input", r#"{"ambient_rank":2,"vertices":[[0,0],[1]]}"#],
        vec!["witness", "--d", "2"],
        vec!["normal", "--input", TWICE_TRIANGLE, "--k", "0"],
        vec!["sos-check", "--input", r#"{"model":{"veronese":{"n":1,"d":2}},"form":[1,2]}"#],
        vec!["epsilon", "--input", r#"{"veronese":{"n":2}}"#],
        vec!["frobnicate"],
    ] {
        let out = sosdeg(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn computation_errors_exit_with_three() {
    let out = sosdeg(&["hstar", "--input", "[[0,0],[3000,0],[0,3000]]", "--oracle"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("too large"));
}
