//! End-to-end checks of the binary contract: JSON on stdout, human text on
//! stderr, the documented exit codes, and byte-deterministic output.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn endcone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_endcone"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn endcone_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_endcone"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child.stdin.take().expect("piped").write_all(input.as_bytes()).expect("write spec");
    child.wait_with_output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn examples_lists_the_catalog() {
    let out = endcone(&["examples"]);
    assert_eq!(code(&out), 0);
    let rows = stdout_json(&out);
    let names: Vec<&str> =
        rows.as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["line", "tree", "omega", "antenna", "comb", "torsion"]);
    for row in rows.as_array().unwrap() {
        assert!(!row["alphabet"].as_array().unwrap().is_empty());
    }
}

#[test]
fn word_problem_exit_codes() {
    let out = endcone(&["wp", "omega", "c", "c"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["identity"], serde_json::json!(true));

    let out = endcone(&["wp", "omega", "a", "b"]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["identity"], serde_json::json!(false));
    assert!(v["witness"].is_object());

    let out = endcone(&["wp", "antenna", "a", "c'", "b", "c", "a'", "c'", "b'", "c"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn order_reports_finite_and_infinite() {
    let out = endcone(&["order", "omega", "c"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["order"], serde_json::json!(2));

    let out = endcone(&["order", "omega", "a"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["finite"], serde_json::json!(false));
}

#[test]
fn expand_is_byte_deterministic() {
    let first = endcone(&["expand", "antenna", "--radius", "3", "--format", "dot"]);
    let second = endcone(&["expand", "antenna", "--radius", "3", "--format", "dot"]);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());

    let out = endcone(&["expand", "omega", "--radius", "1"]);
    assert_eq!(code(&out), 0);
    let ball = stdout_json(&out);
    assert_eq!(ball["vertex_count"], serde_json::json!(4));
    assert_eq!(ball["root"], serde_json::json!("p0"));
}

#[test]
fn act_walks_and_flags_unknown_vertices() {
    let out = endcone(&["act", "omega", "p0", "c"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["to"], serde_json::json!("q0"));

    let out = endcone(&["act", "omega", "nowhere", "a"]);
    assert_eq!(code(&out), 3);
    assert_eq!(stdout_json(&out)["defined"], serde_json::json!(false));
}

#[test]
fn infer_then_verify_round_trips() {
    let out = endcone(&["infer", "line", "--radius", "8", "--depth", "2"]);
    assert_eq!(code(&out), 0);
    let path = std::env::temp_dir().join(format!("endcone-cli-test-{}.json", std::process::id()));
    std::fs::write(&path, &out.stdout).expect("write system");

    let ok = endcone(&["verify", "line", "--system", path.to_str().unwrap()]);
    assert_eq!(code(&ok), 0);
    assert_eq!(stdout_json(&ok)["verified"], serde_json::json!(true));

    // The same presentation against a different graph must be rejected.
    let bad = endcone(&["verify", "omega", "--system", path.to_str().unwrap()]);
    assert_eq!(code(&bad), 4);
    assert_eq!(stdout_json(&bad)["verified"], serde_json::json!(false));
    std::fs::remove_file(&path).ok();
}

#[test]
fn specs_read_from_stdin() {
    let out = endcone_stdin(&["wp", "-", "c", "c"], r#"{"kind": "example", "name": "omega"}"#);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["identity"], serde_json::json!(true));
}

#[test]
fn bad_input_exits_two() {
    let out = endcone(&["wp", "omega", "zz"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let out = endcone(&["wp", "nosuchgraph", "a"]);
    assert_eq!(code(&out), 2);

    let out = endcone(&["expand", "omega", "--center", "zz9", "--radius", "1"]);
    assert_eq!(code(&out), 2);
}
