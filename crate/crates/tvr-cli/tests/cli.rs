//! End-to-end tests of the `tvr` binary: verdict lines, exit codes, and
//! file round-trips.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const EX_TEXT: &str = "\
dim 2
states A B
trans dAA A add -3 4 A
trans dAB A tst B
trans dBB B add 1 -1 B
trans dBA B add 1 0 A
";

const EX_LPS_CERT: &str = r#"{
  "type": "lps",
  "segments": [
    {"path": ["dAA"]},
    {"cycle": ["dAB", "dBB", "dBB", "dBA", "dAA"], "count": 1},
    {"path": ["dAB"]},
    {"cycle": ["dBB"], "count": 6},
    {"path": ["dBA"]}
  ]
}"#;

fn tvr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tvr")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout_line(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).lines().next().unwrap_or("").to_string()
}

#[test]
fn reach_verdicts_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "ex.tvr", EX_TEXT);

    let out = tvr(&["reach", &model, "--from", "A 3 5", "--to", "A 5 5"]);
    assert_eq!(stdout_line(&out), "REACHABLE");
    assert_eq!(out.status.code(), Some(0));

    let out = tvr(&["reach", &model, "--from", "A 0 2", "--to", "A 0 5"]);
    assert_eq!(stdout_line(&out), "UNREACHABLE");
    assert_eq!(out.status.code(), Some(0));

    let out = tvr(&["reach", &model, "--from", "A 3 5", "--to", "A 5 5", "--json"]);
    let json_line = String::from_utf8_lossy(&out.stdout).lines().nth(1).unwrap().to_string();
    let v: serde_json::Value = serde_json::from_str(&json_line).unwrap();
    assert_eq!(v["schema"], "tvr/1");
    assert_eq!(v["outcome"], "REACHABLE");
    assert!(v["certificate"].is_object());
    assert!(v["stats"]["explored"].is_u64());
}

#[test]
fn bounded_and_terminates() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "ex.tvr", EX_TEXT);

    let out = tvr(&["bounded", &model, "--from", "A 3 5"]);
    assert_eq!(stdout_line(&out), "UNBOUNDED");
    assert_eq!(out.status.code(), Some(0));

    let out = tvr(&["terminates", &model, "--from", "A 3 5"]);
    assert_eq!(stdout_line(&out), "NONTERMINATING");
    assert_eq!(out.status.code(), Some(0));

    let decr = write(dir.path(), "decr.tvr", "dim 2\nstates p\ntrans t p add -1 0 p\n");
    let out = tvr(&["bounded", &decr, "--from", "p 5 0"]);
    assert_eq!(stdout_line(&out), "BOUNDED");
    let out = tvr(&["terminates", &decr, "--from", "p 5 0"]);
    assert_eq!(stdout_line(&out), "TERMINATING");
}

#[test]
fn check_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "ex.tvr", EX_TEXT);
    let cert = write(dir.path(), "cert.json", EX_LPS_CERT);

    let out = tvr(&["check", &model, "--from", "A 3 5", "--to", "A 7 5", "--cert", &cert]);
    assert_eq!(stdout_line(&out), "VALID");
    assert_eq!(out.status.code(), Some(0));

    let out = tvr(&["check", &model, "--from", "A 3 5", "--to", "A 9 5", "--cert", &cert]);
    assert_eq!(stdout_line(&out), "INVALID");
    assert_eq!(out.status.code(), Some(0));

    let bad = write(dir.path(), "bad.json", r#"{"type": "nope"}"#);
    let out = tvr(&["check", &model, "--from", "A 3 5", "--to", "A 7 5", "--cert", &bad]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn system_dump() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "ex.tvr", EX_TEXT);
    let cert = write(dir.path(), "cert.json", EX_LPS_CERT);
    let out =
        tvr(&["system", &model, "--from", "A 3 5", "--to", "A 7 5", "--cert", &cert, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stdout).trim()).unwrap();
    assert_eq!(v["vars"], 2);
    // between the all-plain and all-tested row counts for k = 2
    let rows = v["rows"].as_array().unwrap().len();
    assert!((6 * 2 + 6..=9 * 2 + 7).contains(&rows), "unexpected row count {rows}");
}

#[test]
fn woca_dump() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "ex.tvr", EX_TEXT);
    let out = tvr(&["woca", &model]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    // dAA splits into a seven-step chain, dAB stays one zero-test
    assert_eq!(text.lines().filter(|l| l.starts_with("wtrans dAA#")).count(), 7);
    assert!(text.lines().any(|l| l.starts_with("wtrans dAB A tst B weight 0")));
}

#[test]
fn gen_is_deterministic_and_parses() {
    let out1 = tvr(&["gen", "--seed", "9", "--states", "3", "--max-norm", "2"]);
    let out2 = tvr(&["gen", "--seed", "9", "--states", "3", "--max-norm", "2"]);
    assert_eq!(out1.stdout, out2.stdout);
    assert_eq!(out1.status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gen.tvr");
    let text = String::from_utf8_lossy(&out1.stdout).to_string();
    fs::write(&path, &text).unwrap();
    let out = tvr(&["bounded", path.to_str().unwrap(), "--from", "S0 0 0"]);
    assert_ne!(out.status.code(), Some(2), "generated model must parse");

    // density zero generates a plain vass
    let out = tvr(&["gen", "--seed", "4", "--states", "2", "--test-density", "0"]);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("vass"));
    assert!(!text.contains("tst"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "ex.tvr", EX_TEXT);

    let out = tvr(&["reach", &model, "--from", "A 3", "--to", "A 5 5"]);
    assert_eq!(out.status.code(), Some(2));

    let out = tvr(&["reach", &model, "--from", "C 3 5", "--to", "A 5 5"]);
    assert_eq!(out.status.code(), Some(2));

    let bad = write(dir.path(), "bad.tvr", "dim 2\nstates A\ntrans t A add 1 A\n");
    let out = tvr(&["reach", &bad, "--from", "A 0 0", "--to", "A 0 0"]);
    assert_eq!(out.status.code(), Some(2));

    let out = tvr(&["nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_exits_10() {
    let dir = tempfile::tempdir().unwrap();
    // a pumping model driven far past tiny caps: the target is
    // unreachable but both closures are infinite, so tiny caps cannot
    // decide and the verdict must be an honest unknown
    let model = write(
        dir.path(),
        "pump.tvr",
        "dim 2\nstates p q\ntrans up p add 1 1 p\ntrans down p add -1 -1 p\ntrans go p add 0 0 q\ntrans back q add 0 0 p\n",
    );
    let out = tvr(&[
        "reach", &model, "--from", "p 0 0", "--to", "q 5 4", "--cap-norm", "3", "--cap-steps",
        "40", "--const-c", "0",
    ]);
    assert_eq!(stdout_line(&out), "UNKNOWN");
    assert_eq!(out.status.code(), Some(10));
}
