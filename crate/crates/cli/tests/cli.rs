//! Subcommand surface tests: literals, structured output, exit codes.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schneider-cf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("structured output is one JSON document")
}

#[test]
fn expand_text_and_exit_codes() {
    let out = run(&["expand", "-p", "2", "4/3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "pairs: (2,1)(1,1)\nterminal: zero\norbit length: 2"
    );

    let out = run(&["expand", "-p", "2", "--", "-1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("terminal: minus_p"));

    // Hitting the cap reports the residual and exits 2.
    let out = run(&["expand", "-p", "2", "--cap", "1", "4/3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("truncated 2"));
}

#[test]
fn expand_structured_round_trips_through_eval() {
    let out = run(&["expand", "-p", "2", "--format", "structured", "11/17"]);
    let doc = json(&out);
    assert_eq!(doc["status"], "ok");
    assert_eq!(doc["terminal"], "zero");
    let pairs: String = doc["pairs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|pair| format!("({},{})", pair[0], pair[1]))
        .collect();
    let out = run(&["eval", "-p", "2", &pairs, "0"]);
    assert_eq!(stdout(&out), "11/17");
}

#[test]
fn eval_examples_and_validation() {
    assert_eq!(stdout(&run(&["eval", "-p", "2", "(2,1)(1,1)", "0"])), "4/3");
    assert_eq!(
        stdout(&run(&["eval", "-p", "2", "(0,1)", "--", "-2"])),
        "-1"
    );
    assert_eq!(stdout(&run(&["eval", "-p", "5", "", "0"])), "0");

    let out = run(&[
        "eval",
        "-p",
        "2",
        "--format",
        "structured",
        "(0,1)(0,1)",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["kind"], "invariant_violation");
}

#[test]
fn conjugate_handles_both_literal_kinds() {
    assert_eq!(stdout(&run(&["conjugate", "-p", "2", "4/3"])), "3*2^2");
    assert_eq!(stdout(&run(&["conjugate", "-p", "2", "0"])), "0");
    assert_eq!(
        stdout(&run(&["conjugate", "-p", "2", "0:1,1,0,1"])),
        "0:1,1,0,0"
    );
    assert_eq!(stdout(&run(&["conjugate", "-p", "2", "zero"])), "zero");
}

#[test]
fn invert_handles_all_literal_kinds() {
    assert_eq!(stdout(&run(&["invert", "-p", "2", "3*2^2"])), "4/3");
    assert_eq!(stdout(&run(&["invert", "-p", "2", "--", "-1"])), "-1");
    assert_eq!(stdout(&run(&["invert", "-p", "2", "0"])), "0");
    assert_eq!(stdout(&run(&["invert", "-p", "2", "12"])), "4/3");

    let out = run(&["invert", "-p", "2", "--format", "structured", "1/3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["kind"], "not_dyadic");
}

#[test]
fn conjugate_then_invert_is_identity_at_the_process_boundary() {
    for x in ["4/3", "-7/5", "12", "-1", "0", "355/113"] {
        let image = stdout(&run(&["conjugate", "-p", "3", "--", x]));
        let back = stdout(&run(&["invert", "-p", "3", "--", &image]));
        assert_eq!(back, x, "round trip through the CLI failed for {x}");
    }
}

#[test]
fn classify_reports_both_outcomes() {
    let out = run(&["classify", "-p", "2", "12"]);
    assert_eq!(stdout(&out), "rational preimage: 4/3");
    let out = run(&["classify", "-p", "2", "--format", "structured", "12"]);
    assert_eq!(json(&out)["rational"], "4/3");
    let out = run(&["classify", "-p", "7", "0"]);
    assert_eq!(stdout(&out), "rational preimage: 0");
    let out = run(&["classify", "-p", "2", "1/3"]);
    assert_eq!(stdout(&out), "irrational preimage");
}

#[test]
fn orbit_traces_both_maps() {
    assert_eq!(
        stdout(&run(&["orbit", "-p", "2", "4/3", "5"])),
        "4/3\n2\n0 (fixed)"
    );
    assert_eq!(
        stdout(&run(&["orbit", "-p", "2", "--map", "sigma", "12", "3"])),
        "12\n2\n0 (fixed)"
    );
    assert_eq!(stdout(&run(&["orbit", "-p", "3", "0", "2"])), "0 (fixed)");

    let out = run(&["orbit", "-p", "2", "--format", "structured", "4/3", "5"]);
    let doc = json(&out);
    assert_eq!(doc["iterates"], serde_json::json!(["4/3", "2", "0"]));
    assert_eq!(doc["fixed"], true);
}

#[test]
fn digits_prints_streams() {
    assert_eq!(stdout(&run(&["digits", "-p", "2", "1/3"])), "0:1|1,0");
    assert_eq!(stdout(&run(&["digits", "-p", "3", "0"])), "zero");
    let out = run(&["digits", "-p", "2", "--format", "structured", "6"]);
    let doc = json(&out);
    assert_eq!(doc["stream"], "1:1,1|0");
    assert_eq!(doc["valuation"], 1);
}

#[test]
fn parse_errors_are_reported() {
    let out = run(&["expand", "-p", "2", "not-a-number"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));

    let out = run(&["expand", "-p", "4", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("primality"));
}

#[test]
fn selftest_is_deterministic_per_seed() {
    let a = run(&[
        "selftest",
        "-p",
        "3",
        "--seed",
        "7",
        "--format",
        "structured",
    ]);
    let b = run(&[
        "selftest",
        "-p",
        "3",
        "--seed",
        "7",
        "--format",
        "structured",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let doc = json(&a);
    assert_eq!(doc["all_passed"], true);
    assert_eq!(doc["suites"].as_array().unwrap().len(), 6);
}

#[test]
fn selftest_passes_for_the_large_prime() {
    let out = run(&["selftest", "-p", "101", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("all suites passed"));
}
