//! The twelve acceptance criteria, one PASS/FAIL line each. Runs without the
//! libtest harness so the lines always reach the terminal.

use std::process::Command;

use rhaly_core::suite::{self, Context, Outcome};

fn suite_bytes(threads: usize) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_rhaly"))
        .arg("suite")
        .env("RHALY_THREADS", threads.to_string())
        .output()
        .expect("binary runs");
    (out.status.code(), out.stdout)
}

/// The whole battery through the binary on one and on eight threads.
fn determinism(inner: Outcome) -> Outcome {
    let (code1, one) = suite_bytes(1);
    let (code8, eight) = suite_bytes(8);
    let same = one == eight && code1 == code8 && !one.is_empty();
    let mut o = inner;
    o.checks.push(suite::Check {
        label: "suite reports byte-identical on 1 and 8 threads".into(),
        pass: same,
        value: serde_json::json!({"bytes": [one.len(), eight.len()], "exit": [code1, code8]}),
    });
    o.passed = o.passed && same;
    o
}

fn main() {
    let ctx = Context::new();
    let mut failed = 0;
    for id in 1..=suite::CRITERIA {
        let mut o = suite::run_criterion(id, &ctx);
        if id == 12 {
            o = determinism(o);
        }
        println!("{}", o.line());
        if !o.passed {
            println!("{}", o.failures());
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {} failed",
        suite::CRITERIA - failed,
        failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
