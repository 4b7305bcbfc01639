//! End-to-end tests of the command-line interface through its public
//! `run` entry point.

use charvar::cli::run;

fn run_cli(args: &[&str]) -> (i32, String) {
    let argv: Vec<String> = std::iter::once("charvar")
        .chain(args.iter().copied())
        .map(str::to_owned)
        .collect();
    let mut out = Vec::new();
    let code = run(&argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

#[test]
fn compute_char_text_output() {
    let (code, out) = run_cli(&["compute-char", "--genus", "1", "--semisimple", "sym:x1"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out, "q^2 + 4q + 1\n");
}

#[test]
fn compute_rep_with_verification() {
    let (code, out) = run_cli(&[
        "compute-rep",
        "--genus",
        "1",
        "--jordan-plus",
        "1",
        "--semisimple",
        "rat:2/1",
        "--semisimple",
        "rat:1/2",
        "--verify",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("verified: independent route agrees"), "{out}");
}

#[test]
fn json_output_is_deterministic_and_parses() {
    let args = [
        "--format",
        "json",
        "compute-char",
        "--genus",
        "2",
        "--semisimple",
        "zeta:4:1",
        "--semisimple",
        "zeta:4:1",
    ];
    let (code, first) = run_cli(&args);
    assert_eq!(code, 0, "{first}");
    let (_, second) = run_cli(&args);
    assert_eq!(first, second, "repeated runs must be byte-identical");
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["command"], "compute-char");
    assert!(v["pretty"].as_str().unwrap().starts_with('q'));
}

#[test]
fn oracle_count_compare_agrees() {
    let (code, out) = run_cli(&[
        "oracle-count",
        "--genus",
        "1",
        "--prime",
        "3",
        "--prime",
        "5",
        "--compare",
    ]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.matches("(agree)").count(), 2, "{out}");
}

#[test]
fn bad_eigenvalue_yields_error_json() {
    let (code, out) = run_cli(&["compute-char", "--semisimple", "rat:not-a-number"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["code"], "eigen");
    assert!(!v["error"]["message"].as_str().unwrap().is_empty());
}

#[test]
fn twisted_case_reports_out_of_scope() {
    let (code, out) = run_cli(&["compute-char", "--genus", "1", "--minus-id", "1"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["code"], "out-of-scope-twisted");
}

#[test]
fn unknown_tube_kind_is_usage_error() {
    let (code, out) = run_cli(&["tube-matrix", "--kind", "moebius"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["code"], "usage");
}
