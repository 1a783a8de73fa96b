//! End-to-end tests of the binary: outputs, exit codes and the cache file.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bosonext"))
}

fn run_json(args: &[&str]) -> serde_json::Value {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn normalize_bosonic_relation() {
    let v = run_json(&["normalize", "--type", "A2", "f(1,0)*f(1,1)"]);
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    assert_eq!(terms[0]["coeff"], "q^2");
    assert_eq!(terms[0]["monomial"], serde_json::json!([[1, 1], [1, 0]]));
    assert_eq!(terms[1]["coeff"], "1 - q^2");
    assert_eq!(terms[1]["monomial"], serde_json::json!([]));
}

#[test]
fn form_value_and_text_mode() {
    let v = run_json(&["form", "--type", "A2", "f(1,0)", "f(1,0)"]);
    assert_eq!(v["value"], "1 - q^2");
    let out = bin()
        .args(["form", "--type", "A2", "--text", "f(1,0)", "f(1,0)"])
        .output()
        .unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1 - q^2");
}

#[test]
fn pair_value() {
    let v = run_json(&["pair", "--type", "A2", "f(1,0)", "f(1,0)"]);
    assert_eq!(v["value"], "q^{-1} - q");
}

#[test]
fn divided_power_and_scalars() {
    let v = run_json(&["normalize", "--type", "A2", "dp(f(1,0),2) + q^{1/2}*f(2,0)"]);
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
}

#[test]
fn verify_suite_contract() {
    let v = run_json(&[
        "verify", "--type", "A2", "--suite", "relations", "--trials", "5", "--seed", "7",
    ]);
    assert_eq!(v["suite"], "relations");
    assert_eq!(v["passed"], true);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["trials"], 5);
}

#[test]
fn exit_codes() {
    // computation error: bad expression
    let out = bin().args(["normalize", "--type", "A2", "f(1,"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("offset 4"));
    // usage error: unknown type
    let out = bin().args(["normalize", "--type", "Q9", "f(1,0)"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // usage error: unknown flag (from the argument parser)
    let out = bin().args(["normalize", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gram_output() {
    let v = run_json(&["gram", "--type", "A2", "--weight", "1,1"]);
    assert_eq!(v["basis"], serde_json::json!([[1, 2], [2, 1]]));
    assert_eq!(v["gram"][0][1], "q");
}

#[test]
fn cartan_file_input() {
    let dir = std::env::temp_dir().join("bosonext-test-cartan");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("a2.txt");
    std::fs::write(&path, "2\n2 -1\n-1 2\n1 1\n").unwrap();
    let v = run_json(&[
        "form",
        "--cartan-file",
        path.to_str().unwrap(),
        "f(1,0)",
        "f(1,0)",
    ]);
    assert_eq!(v["value"], "1 - q^2");
}

#[test]
fn gb_table_with_cache() {
    let dir = std::env::temp_dir().join("bosonext-test-cache");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("gb.json");
    let _ = std::fs::remove_file(&path);
    let args = [
        "gb-table", "--type", "A2", "--levels", "0,1", "--max-sh", "2", "--cache",
        path.to_str().unwrap(),
    ];
    let first = run_json(&args);
    assert!(path.exists(), "cache file written");
    let second = run_json(&args);
    assert_eq!(first, second, "cached run must reproduce the table");
    let rows = first["rows"].as_array().unwrap();
    assert!(rows.len() >= 10);
    // single-generator rows expose the q_i^{1/2} normalization
    let has_gen = rows.iter().any(|r| {
        r["element"].as_array().map_or(false, |terms| {
            terms.len() == 1 && terms[0]["coeff"] == "q^{1/2}"
        })
    });
    assert!(has_gen);
    // the environment variable is honored too
    let path2 = dir.join("gb-env.json");
    let _ = std::fs::remove_file(&path2);
    let out = bin()
        .args(["gb-table", "--type", "A2", "--levels", "0,0", "--max-sh", "1"])
        .env("BOSONEXT_CACHE", path2.to_str().unwrap())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(path2.exists());
}

#[test]
fn deterministic_output() {
    let a = run_json(&["normalize", "--type", "B2", "f(2,1)*f(1,0)*f(2,0)"]);
    let b = run_json(&["normalize", "--type", "B2", "f(2,1)*f(1,0)*f(2,0)"]);
    assert_eq!(a, b);
}

#[test]
fn gb_table_accepts_negative_levels() {
    let v = run_json(&["gb-table", "--type", "A2", "--levels", "-1,0", "--max-sh", "1"]);
    let rows = v["rows"].as_array().unwrap();
    assert!(rows.iter().any(|r| {
        r["index"]
            .as_array()
            .map_or(false, |idx| idx.iter().any(|p| p[0] == serde_json::json!(-1)))
    }));
}
