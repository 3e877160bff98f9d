//! CLI behavior: JSON round trips, exit codes, and the machine-readable
//! error channel.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biquat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is a single JSON document")
}

/// The error document is the last stderr line (the options echo precedes
/// it when the command got far enough to resolve its inputs).
fn stderr_error(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let last = text.lines().last().expect("error line on stderr");
    serde_json::from_str(last).expect("machine-readable error document")
}

#[test]
fn eig_matches_documented_output() {
    let out = run(&["eig", "--E", "1,0,0", "--B", "0,0,0"]);
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        r#"{"lambda_T":0.5,"lambda_F":1.0,"lambda_Fstar":0.0}"#
    );
}

#[test]
fn exp_zero_is_identity_matrix() {
    let out = run(&["exp", "--zero"]);
    let v = stdout_json(&out);
    assert_eq!(v[0][0], 1.0);
    assert_eq!(v[1][1], 1.0);
    assert_eq!(v[0][1], 0.0);
}

#[test]
fn biquat_documents_round_trip_as_inputs() {
    // exp emits a biquaternion document that log accepts unchanged
    let q = r#"{"a0":[0,0],"A":[[0.3,0.1],[0,0.2],[0.5,0]],"chirality":"S"}"#;
    let exp_out = run(&["exp", "--biquat", q]);
    let exp_doc = String::from_utf8(exp_out.stdout.clone()).unwrap();
    assert!(exp_out.status.success());
    let log_out = run(&["log", "--biquat", exp_doc.trim()]);
    assert!(log_out.status.success());
    let d: serde_json::Value = stdout_json(&log_out);
    // and the log output is again accepted by exp
    let again = run(&["exp", "--biquat", &d.to_string()]);
    assert!(again.status.success());
}

#[test]
fn matrix_documents_round_trip_as_inputs() {
    let exp_out = run(&["exp", "--so31", "[[0,0.7,0,0],[0.7,0,0,0],[0,0,0,0.4],[0,0,-0.4,0]]"]);
    let l = String::from_utf8(exp_out.stdout.clone()).unwrap();
    assert!(exp_out.status.success());
    let log_out = run(&["log", "--so31", l.trim()]);
    assert!(log_out.status.success());
    let lift_out = run(&["lift", "--matrix", l.trim()]);
    assert!(lift_out.status.success());
}

#[test]
fn holonomy_linking_loop_reports_sign() {
    let out = run(&[
        "holonomy", "--field", "example3", "--loop", "builtin-linking", "--samples", "256",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["sign"], -1);
}

#[test]
fn validation_errors_exit_2_with_json() {
    let out = run(&["eig", "--E", "1,0", "--B", "0,0,0"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_error(&out);
    assert_eq!(err["error"], "bad_vector");
    assert!(out.stdout.is_empty());
}

#[test]
fn domain_errors_exit_2_with_code() {
    // speed not subluminal
    let out = run(&["doppler", "--E", "1,0,0", "--B", "0,1,0", "--w", "0,0,1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_error(&out);
    assert_eq!(err["error"], "speed_not_subluminal");
    // chirality mismatch
    let out = run(&[
        "mul",
        "--p",
        r#"{"a0":[0,0],"A":[[1,0],[0,0],[0,0]],"chirality":"S"}"#,
        "--q",
        r#"{"a0":[0,0],"A":[[1,0],[0,0],[0,0]],"chirality":"SBar"}"#,
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_error(&out);
    assert_eq!(err["error"], "chirality_mismatch");
}

#[test]
fn unknown_flags_rejected() {
    let out = run(&["eig", "--E", "1,0,0", "--B", "0,0,0", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_error(&out);
    assert_eq!(err["error"], "usage");
}

#[test]
fn every_run_echoes_resolved_options() {
    let out = run(&["spin-prob", "--v", "1,0,0", "--w", "0,1,0"]);
    assert!(out.status.success());
    let first_line = String::from_utf8_lossy(&out.stderr);
    let echo: serde_json::Value =
        serde_json::from_str(first_line.lines().next().unwrap()).expect("echo JSON");
    assert_eq!(echo["command"], "spin-prob");
    assert_eq!(echo["options"]["v"][0], 1.0);
    assert_eq!(echo["options"]["u"][0], 1.0);
}

#[test]
fn track_multiple_paths_parallel_matches_sequential() {
    let paths = r#"[
        {"points": [[0.0],[0.5],[1.0]], "closed": false},
        {"points": [[-1.0],[0.0],[1.0]], "closed": false}
    ]"#;
    let dir = std::env::temp_dir().join("biquat_paths_test.json");
    std::fs::write(&dir, paths).unwrap();
    let p = dir.to_str().unwrap();
    let seq = run(&["track", "--field", "example1", "--paths-file", p]);
    let par = run(&["track", "--field", "example1", "--paths-file", p, "--parallel"]);
    assert!(seq.status.success() && par.status.success());
    assert_eq!(seq.stdout, par.stdout);
}

#[test]
fn explicit_field_file_accepted() {
    let field = r#"{
        "ts": [0.0, 1.0],
        "matrices": [
            [[[1,0],[0,0]],[[0,0],[2,0]]],
            [[[2,0],[0,0]],[[0,0],[3,0]]]
        ],
        "scalars": "real"
    }"#;
    let dir = std::env::temp_dir().join("biquat_field_test.json");
    std::fs::write(&dir, field).unwrap();
    let out = run(&[
        "track", "--field-file", dir.to_str().unwrap(), "--range", "0,1", "--samples", "8",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["monodromy"], serde_json::json!([0, 1]));
}

#[test]
fn internal_alarm_exits_1() {
    // perturb a boost just enough to slip past the proper-Lorentz gate
    // while failing the lift's recomposition check
    let c = 1.0f64.cosh();
    let s = 1.0f64.sinh();
    let l = format!("[[{c},{s},0,0],[{s},{c},0,0],[0,0,1,8e-9],[0,0,0,1]]");
    let out = run(&["lift", "--matrix", &l]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_error(&out);
    assert_eq!(err["error"], "lift_failed");
}

#[test]
fn degenerate_zero_field_is_flagged() {
    let out = run(&["eig", "--E", "0,0,0", "--B", "0,0,0"]);
    let v = stdout_json(&out);
    assert_eq!(v["degenerate"], true);
}
