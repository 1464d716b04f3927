use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"))
}

fn posetfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posetfree"))
        .args(args)
        .env_remove("POSET_CONTAINERS_CAPS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn validate_reports_flags() {
    let out = posetfree(&["--pretty", "poset", "validate", s(&fixture("v"))]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for line in ["height=2", "tree=true", "graded=true"] {
        assert!(text.lines().any(|l| l == line), "{text}");
    }
    let out = posetfree(&["poset", "validate", s(&fixture("butterfly"))]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["tree"], false);
}

#[test]
fn census_count_of_antichains() {
    let out = posetfree(&["census", "count", "--poset", s(&fixture("chain2")), "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "168");
}

#[test]
fn container_pair_round_trip() {
    let dir = TempDir::new().unwrap();
    let fam = write(&dir, "fam.txt", "4\n1100\n1010\n0110\n0001\n");
    let chain2 = fixture("chain2");
    let args = ["containers", "run", s(&chain2), s(&fam), "--root", "0", "--t", "2"];
    let first = posetfree(&args);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(first.stdout, posetfree(&args).stdout);
    let pair = write(&dir, "pair.json", &stdout(&first));
    let out = posetfree(&["containers", "verify", s(&pair), s(&fam)]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["g_free"], true);

    // A family the pair was not built from is not sandwiched.
    let other = write(&dir, "other.txt", "4\n1111\n");
    assert_eq!(posetfree(&["containers", "verify", s(&pair), s(&other)]).status.code(), Some(1));
}

#[test]
fn two_phase_run() {
    let dir = TempDir::new().unwrap();
    let fam = write(&dir, "fam.txt", "3\n100\n010\n001\n");
    let out = posetfree(&[
        "containers", "run", s(&fixture("v")), s(&fam), "--root", "0", "--t", "3", "--two-phase", "--t2", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let pair: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(pair["phases"].as_array().unwrap().len(), 2);
    assert_eq!(pair["t"], 2);
}

#[test]
fn family_with_the_poset_is_a_domain_error() {
    let dir = TempDir::new().unwrap();
    let fam = write(&dir, "fam.txt", "2\n00\n11\n");
    let out = posetfree(&["containers", "run", s(&fixture("chain2")), s(&fam), "--root", "0", "--t", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("forbidden"));
}

#[test]
fn usage_errors_exit_two() {
    let out = posetfree(&["census", "count", "--poset", s(&fixture("chain2")), "--bogus", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--bogus"));
    // Randomized commands insist on a seed.
    let out = posetfree(&["census", "experiment", "--poset", s(&fixture("chain2")), "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn caps_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_posetfree"))
        .args(["census", "count", "--poset", s(&fixture("chain2")), "--n", "4"])
        .env("POSET_CONTAINERS_CAPS", "census_n=3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn experiment_is_reproducible_and_written_to_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("table.csv");
    let v = fixture("v");
    let args = [
        "census", "experiment", "--poset", s(&v), "--n", "4", "--seed", "7", "--samples", "6",
    ];
    let first = posetfree(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, posetfree(&args).stdout);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", s(&path)]);
    assert_eq!(posetfree(&with_out).status.code(), Some(0));
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, first.stdout);
    assert!(stdout(&first).starts_with("n,count,la"));
}

#[test]
fn embedding_queries() {
    let dir = TempDir::new().unwrap();
    let fam = write(&dir, "fam.txt", "{\"n\": 2, \"members\": [0, 1, 3]}");
    let out = posetfree(&["embed", "check", s(&fixture("chain3")), s(&fam)]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["contains"], true);
    assert_eq!(v["embedding"], serde_json::json!([0, 1, 3]));
    let out = posetfree(&["embed", "first-copy", s(&fixture("chain2")), s(&fam), "--root", "0", "--t", "2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["copy"], serde_json::json!([0, 1, 3]));
    let out = posetfree(&["embed", "first-copy", s(&fixture("chain2")), s(&fam), "--root", "0", "--t", "3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["copy"], serde_json::Value::Null);
}

#[test]
fn poset_constructions() {
    let out = posetfree(&["poset", "blowup", s(&fixture("path4")), "--root", "0", "--t", "2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["poset"]["m"], 9);
    assert_eq!(v["labels"].as_array().unwrap().len(), 9);
    let out = posetfree(&["poset", "dual", s(&fixture("v"))]);
    assert_eq!(stdout(&out).trim(), r#"{"m":3,"covers":[[1,0],[2,0]]}"#);
    let out = posetfree(&["poset", "height", s(&fixture("chain4"))]);
    assert_eq!(stdout(&out).trim(), "4");
}
