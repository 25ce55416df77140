//! End-to-end tests of the `tautring` binary: exact stdout bytes, stderr
//! prefixes, and exit codes.

use std::io::Write;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    run_with(args, &[])
}

fn run_with(args: &[&str], envs: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tautring"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("run binary");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        String::from_utf8(out.stderr).expect("utf8 stderr"),
    )
}

fn single_error_line(stderr: &str, prefix: &str) {
    assert_eq!(
        stderr.lines().count(),
        1,
        "expected a single stderr line, got: {stderr:?}"
    );
    assert!(
        stderr.starts_with(&format!("{prefix}: ")),
        "expected prefix {prefix}, got: {stderr:?}"
    );
}

#[test]
fn intersect_genus1_table_entry() {
    let (code, stdout, stderr) = run(&[
        "intersect",
        "--genus",
        "1",
        "--marks",
        "p1,p2,p3",
        "--expr",
        "psi1^2 * dirr",
    ]);
    assert_eq!(code, 0, "stderr: {stderr}");
    assert_eq!(stdout, "1/2\n");
}

#[test]
fn intersect_json_output() {
    let (code, stdout, _) = run(&[
        "intersect",
        "--genus",
        "1",
        "--marks",
        "p1,p2,p3",
        "--expr",
        "lambda1*psi1*d0{2,3}",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "{\"value\":\"1/24\"}\n");
}

#[test]
fn intersect_genus0() {
    let (code, stdout, _) = run(&[
        "intersect",
        "--genus",
        "0",
        "--marks",
        "a,b,c,d,e",
        "--expr",
        "psi1 * psi2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "2\n");
}

#[test]
fn intersect_strict_degree_error() {
    let (code, stdout, stderr) = run(&[
        "intersect",
        "--genus",
        "0",
        "--marks",
        "a,b,c,d,e",
        "--expr",
        "psi1",
    ]);
    assert_eq!(code, 2);
    assert!(stdout.is_empty());
    single_error_line(&stderr, "E_DEGREE");
}

#[test]
fn intersect_lenient_off_degree() {
    let (code, stdout, _) = run(&[
        "intersect",
        "--genus",
        "0",
        "--marks",
        "a,b,c,d,e",
        "--expr",
        "psi1",
        "--lenient",
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "0\n");
}

#[test]
fn intersect_syntax_error() {
    let (code, stdout, stderr) = run(&[
        "intersect",
        "--genus",
        "1",
        "--marks",
        "p1,p2,p3",
        "--expr",
        "psi1 ** 2",
    ]);
    assert_eq!(code, 2);
    assert!(stdout.is_empty());
    single_error_line(&stderr, "E_SYNTAX");
    assert!(stderr.contains("position 6"), "stderr: {stderr}");
}

#[test]
fn intersect_bad_mark_index() {
    let (code, _, stderr) = run(&[
        "intersect",
        "--genus",
        "1",
        "--marks",
        "p1,p2,p3",
        "--expr",
        "d0{1,9}",
    ]);
    assert_eq!(code, 2);
    single_error_line(&stderr, "E_SCHEMA");
}

#[test]
fn solve_bundled_curves() {
    let (code, stdout, stderr) = run(&["solve", "--curves", "flex_testcurves.json"]);
    assert_eq!(code, 0, "stderr: {stderr}");
    assert!(stdout.contains("coefficient dirr = 4/3\n"), "out: {stdout}");
    assert!(stdout.contains("coefficient d0{1,2} = 4\n"));
    assert!(stdout.contains("coefficient d0{1,2,3} = 4\n"));
    assert!(stdout.contains("aux c = 2\n"));
    assert!(stdout.contains("rank 4 of 7 equations\n"));
    assert!(stdout.contains("consistent: true\n"));
}

#[test]
fn solve_independent_mode() {
    let (code, stdout, _) = run(&["solve", "--curves", "flex_testcurves.json", "--independent"]);
    assert_eq!(code, 0);
    assert!(
        stdout.contains("coefficient d0{1,2} = 4\n"),
        "out: {stdout}"
    );
    assert!(stdout.contains("coefficient d0{1,3} = 4\n"));
    assert!(stdout.contains("coefficient d0{2,3} = 4\n"));
    assert!(stdout.contains("consistent: true\n"));
}

#[test]
fn solve_json_matches_report_schema() {
    let (code, stdout, _) = run(&[
        "solve",
        "--curves",
        "flex_testcurves.json",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let value: serde_json::Value = serde_json::from_str(&stdout).expect("valid json");
    assert_eq!(value["coefficients"]["dirr"], "4/3");
    assert_eq!(value["aux"]["c"], "2");
    assert_eq!(value["rank"], 4);
    assert_eq!(value["equation_count"], 7);
    assert_eq!(value["consistent"], true);
}

#[test]
fn solve_inconsistent_file_exits_3_but_prints_report() {
    let text = include_str!("../data/flex_testcurves.json");
    let mut doc: serde_json::Value = serde_json::from_str(text).expect("bundled json");
    let curves = doc["curves"].as_array_mut().expect("curves array");
    let last = curves.last_mut().expect("nonempty");
    assert_eq!(last["name"], "B7");
    last["rhs"]["constant"] = serde_json::Value::String("1".into());

    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    write!(file, "{doc}").expect("write temp");
    let path = file.path().to_str().expect("utf8 path");

    let (code, stdout, stderr) = run(&["solve", "--curves", path]);
    assert_eq!(code, 3);
    single_error_line(&stderr, "E_INCONSISTENT");
    assert!(stderr.contains("B7"), "stderr: {stderr}");
    assert!(stdout.contains("consistent: false\n"), "out: {stdout}");
    assert!(stdout.contains("residual B7 = -1\n"), "out: {stdout}");
}

#[test]
fn solve_missing_file_is_schema_error() {
    let (code, _, stderr) = run(&["solve", "--curves", "/no/such/file.json"]);
    assert_eq!(code, 2);
    single_error_line(&stderr, "E_SCHEMA");
}

#[test]
fn solve_resolves_via_data_env_var() {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("renamed_curves.json");
    std::fs::write(&path, include_str!("../data/flex_testcurves.json")).expect("copy");
    let (code, stdout, _) = run_with(
        &["solve", "--curves", "renamed_curves.json"],
        &[("TAUTRING_DATA", dir.path().to_str().expect("utf8"))],
    );
    assert_eq!(code, 0);
    assert!(stdout.contains("coefficient dirr = 4/3\n"));
}

#[test]
fn gothic_default_json_bytes() {
    let (code, stdout, stderr) = run(&["gothic", "--format", "json"]);
    assert_eq!(code, 0, "stderr: {stderr}");
    assert_eq!(
        stdout,
        "{\"eta3\":\"-13/6\",\"eta2_lambda1\":\"-1/2\",\"lyapunov_sum\":\"6/13\"}\n"
    );
}

#[test]
fn gothic_default_text() {
    let (code, stdout, _) = run(&["gothic"]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        "eta3 = -13/6\neta2_lambda1 = -1/2\nlyapunov_sum = 6/13\n"
    );
}

#[test]
fn gothic_zero_class() {
    let (code, stdout, _) = run(&["gothic", "--class", "zero", "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        "{\"eta3\":\"5/6\",\"eta2_lambda1\":\"1/6\",\"lyapunov_sum\":\"2/5\"}\n"
    );
}

#[test]
fn gothic_class_from_file() {
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    file.write_all(br#"{"dirr":"4/3","d0{1,2}":"4","d0{1,3}":"4","d0{2,3}":"4","d0{1,2,3}":"4"}"#)
        .expect("write temp");
    let (code, stdout, _) = run(&[
        "gothic",
        "--class",
        file.path().to_str().expect("utf8"),
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        "{\"eta3\":\"-13/6\",\"eta2_lambda1\":\"-1/2\",\"lyapunov_sum\":\"6/13\"}\n"
    );
}

#[test]
fn gothic_custom_constants() {
    // Zero out the beta blocks: with the default class the chain reduces to
    // the psi pairings alone.
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    file.write_all(
        br#"{
            "eta_beta": ["0", "0", "0"],
            "lambda_beta": ["0", "0", "0"],
            "beta_multiplicities": [1, 2, 2],
            "fiber_degree_eta": "-1"
        }"#,
    )
    .expect("write temp");
    let (code, stdout, _) = run(&[
        "gothic",
        "--constants",
        file.path().to_str().expect("utf8"),
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        "{\"eta3\":\"-3\",\"eta2_lambda1\":\"-2/3\",\"lyapunov_sum\":\"4/9\"}\n"
    );
}

#[test]
fn gothic_zero_denominator_exit_4() {
    let (code, stdout, stderr) = run(&["gothic", "--class", "dirr=5/12"]);
    assert_eq!(code, 4);
    assert!(stdout.is_empty());
    single_error_line(&stderr, "E_ZERODENOM");
}

#[test]
fn gothic_unknown_inline_key() {
    let (code, _, stderr) = run(&["gothic", "--class", "dirr=1,psi1=2"]);
    assert_eq!(code, 2);
    single_error_line(&stderr, "E_SCHEMA");
}

#[test]
fn selftest_passes_and_repeats_byte_identically() {
    let (code_a, stdout_a, stderr_a) = run(&["selftest", "--format", "json"]);
    assert_eq!(code_a, 0, "stderr: {stderr_a}");
    let (code_b, stdout_b, _) = run(&["selftest", "--format", "json"]);
    assert_eq!(code_b, 0);
    assert_eq!(stdout_a, stdout_b, "selftest output must be deterministic");
    let value: serde_json::Value = serde_json::from_str(&stdout_a).expect("valid json");
    assert_eq!(value["passed"], true);
    assert_eq!(value["checks"].as_array().expect("checks").len(), 11);
}

#[test]
fn selftest_text_table() {
    let (code, stdout, _) = run(&["selftest"]);
    assert_eq!(code, 0);
    for name in [
        "01-intersection-table",
        "02-flex-pairings",
        "03-testcurve-solve",
        "04-gothic-invariants",
        "05a-lambda-dirr-proportionality",
        "05b-lambda-square-vanishes",
        "05c-mark-permutation-equivariance",
        "05d-psi-boundary-substitution",
        "05e-string-dilaton-closed-form",
        "06-solver-robustness",
        "07-determinism",
    ] {
        assert!(
            stdout.contains(&format!("PASS {name}: ")),
            "missing {name}: {stdout}"
        );
    }
    assert!(stdout.ends_with("all 11 checks passed\n"));
}

#[test]
fn usage_error_exits_2() {
    let (code, _, _) = run(&["solve"]);
    assert_eq!(code, 2);
}
