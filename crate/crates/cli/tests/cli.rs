use std::process::{Command, Output};

use rhaly_core::oracle;
use rhaly_core::rhaly::SequenceSpec;
use serde_json::Value;

const CESARO: &str = r#"{"kind":"cesaro","truncation":8191}"#;

fn rhaly(args: &[&str], threads: Option<usize>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rhaly"));
    cmd.args(args);
    match threads {
        Some(n) => cmd.env("RHALY_THREADS", n.to_string()),
        None => cmd.env_remove("RHALY_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_cesaro() {
    let out = rhaly(&["classify", "--spec", CESARO, "--p", "2"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["conclusion"], "Bounded");
    assert_eq!(v["result"]["theorem"], "Thm1a");
    assert_eq!(v["command"], "classify");
    assert_eq!(v["version"], rhaly_core::VERSION);
    assert_eq!(v["config"]["classify"]["p"], 2.0);
    assert_eq!(v["config"]["classify"]["eps_slope"], 0.05);
}

#[test]
fn norm_of_one() {
    let out = rhaly(&["norm", "--coeffs", "[1]", "--p", "2"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["value"], 1.0);
    let out = rhaly(
        &[
            "norm",
            "--coeffs",
            r#"{"coeffs":[[0,0],[1,0]]}"#,
            "--p",
            "2",
            "--space",
            "bergman",
            "--alpha",
            "1",
        ],
        None,
    );
    let v = json(&out)["result"]["value"].as_f64().unwrap();
    assert!((v - 3f64.sqrt().recip()).abs() < 1e-12, "{v}");
}

#[test]
fn opnorm_matches_dense_svd() {
    let out = rhaly(&["opnorm", "--spec", CESARO, "--n", "64"], None);
    assert_eq!(out.status.code(), Some(0));
    let got = json(&out)["result"]["lower"].as_f64().unwrap();
    let want = oracle::dense_opnorm(&SequenceSpec::Cesaro { truncation: 8191 }, 64);
    assert!((got - want).abs() <= 1e-8 * want, "{got} vs {want}");
}

#[test]
fn exit_codes() {
    let bad = rhaly(&["classify", "--spec", "{not json", "--p", "2"], None);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("error [input]"));
    let range = rhaly(&["classify", "--spec", CESARO, "--p", "1"], None);
    assert_eq!(range.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&range.stderr).contains("classifier.p_range"));
    let stuck = rhaly(
        &["opnorm", "--spec", CESARO, "--n", "256", "--max-iter", "2"],
        None,
    );
    assert_eq!(stuck.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&stuck.stderr).contains("rhalyop.no_convergence"));
    let suite = rhaly(&["suite", "--only", "13"], None);
    assert_eq!(suite.status.code(), Some(4));
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let args = ["profile", "--spec", CESARO, "--p", "3"];
    let one = rhaly(&args, Some(1));
    let many = rhaly(&args, Some(8));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn counterexample_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = rhaly(
        &[
            "counterexample",
            "--p",
            "1.5",
            "-K",
            "6",
            "--seed",
            "3",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("blocks.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    let spec: SequenceSpec =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("upsilon_spec.json")).unwrap())
            .unwrap();
    assert_eq!(spec.truncation(), 63);
    let saved: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("counterexample.json")).unwrap())
            .unwrap();
    assert_eq!(saved, json(&out));
}

#[test]
fn basis_check() {
    let out = rhaly(&["basis-check", "--tent", "--n", "32"], None);
    let v = json(&out);
    assert_eq!(v["result"]["within_bound"], true);
    assert_eq!(v["result"]["grid"], 1024);
    let bad = rhaly(&["basis-check", "--profile", "[[0,1],[4,0]]", "--n", "4"], None);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn profile_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = rhaly(
        &[
            "profile",
            "--spec",
            CESARO,
            "--p",
            "2",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(json(&out)["result"]["space"], "BigLambda");
    let csv = std::fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert!(csv.starts_with("N,scaled_norm\n2,"));
    assert_eq!(csv.lines().count(), 13);
}
