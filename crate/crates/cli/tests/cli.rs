use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankjudge"))
        .args(args)
        .env_remove("RANKJUDGE_SEED")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn friedman_text() {
    let out = run(&["friedman", &data("example1.csv")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("48"));
}

#[test]
fn friedman_structured_is_json() {
    let csv = data("example1_by_dataset.csv");
    let out = run(&["--format", "structured", "friedman", &csv, "--orientation", "columns"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.trim_start().starts_with('{'));
    assert!(text.contains("\"rankjudge/1\""));
    assert!(text.contains("\"friedman\""));
}

#[test]
fn mean_ranks_posthoc_carries_caution() {
    let out = run(&["posthoc", &data("example1.csv"), "--test", "mean-ranks"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).to_lowercase().contains("unrelated algorithms"));

    let out = run(&["--format", "structured", "posthoc", &data("example1.csv"), "--test", "mean-ranks"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).to_lowercase().contains("unrelated algorithms"));
}

#[test]
fn stability_runs() {
    let out = run(&["stability", &data("example1.csv"), "--pair", "A,B", "--test", "mean-ranks", "--cardinality", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("0/3") || stdout(&out).contains("0 of 3"), "{}", stdout(&out));
}

#[test]
fn reproduce_first_example_passes() {
    let out = run(&["reproduce", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn power_from_scenario_file() {
    let scenario = data("scenarios/example2.toml");
    let out = run(&["--format", "structured", "power", "--scenario", &scenario, "--replicates", "500", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("\"power\""));
    // same seed, same answer
    let again = run(&["--format", "structured", "power", "--scenario", &scenario, "--replicates", "500", "--seed", "7"]);
    assert_eq!(stdout(&out), stdout(&again));
}

#[test]
fn fwer_from_scenario_file() {
    let scenario = data("scenarios/four_equal_one_better.toml");
    let out = run(&["fwer", "--scenario", &scenario, "--replicates", "300"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "algorithm,d1,d2\nA,1,2\nB,1,oops\n").unwrap();
    assert_eq!(run(&["friedman", bad.to_str().unwrap()]).status.code(), Some(3));

    let one = dir.path().join("one.csv");
    std::fs::write(&one, "algorithm,d1,d2\nA,1,2\n").unwrap();
    assert_eq!(run(&["friedman", one.to_str().unwrap()]).status.code(), Some(4));

    let csv = data("example1.csv");
    assert_eq!(run(&["posthoc", &csv, "--alpha", "1.5"]).status.code(), Some(4));
    assert_eq!(run(&["stability", &csv, "--pair", "A,Z"]).status.code(), Some(4));
    assert_eq!(run(&["friedman", "/nonexistent/x.csv"]).status.code(), Some(6));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}
