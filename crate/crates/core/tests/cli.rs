//! End-to-end runs of the `rdlab` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rdlab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdlab"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("RDLAB_SEED")
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn same_seed_gives_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let names = ["sample.json", "spectrum.json", "spectrum.csv"];
    let mut runs = Vec::new();
    for _ in 0..2 {
        let out = rdlab(dir.path(), &["--seed", "11", "sample", "--n", "10", "--d", "3", "--count", "2"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let out = rdlab(dir.path(), &["--seed", "11", "spectrum", "--n", "12", "--d", "4", "--normalized"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        runs.push(names.map(|name| read(dir.path(), name)));
    }
    for (k, name) in names.iter().enumerate() {
        assert!(runs[0][k] == runs[1][k], "{name} differs between runs");
    }
    let out = rdlab(dir.path(), &["--seed", "12", "sample", "--n", "10", "--d", "3", "--count", "2"]);
    assert!(out.status.success());
    assert!(read(dir.path(), "sample.json") != runs[0][0], "seed has no effect");
}

#[test]
fn seed_comes_from_environment() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let with_env = Command::new(env!("CARGO_BIN_EXE_rdlab"))
        .arg("--out")
        .arg(a.path())
        .args(["sample", "--n", "8", "--d", "2"])
        .env("RDLAB_SEED", "5")
        .output()
        .unwrap();
    assert!(with_env.status.success());
    assert!(rdlab(b.path(), &["--seed", "5", "sample", "--n", "8", "--d", "2"]).status.success());
    let load = |dir: &Path| -> serde_json::Value { serde_json::from_slice(&read(dir, "sample.json")).unwrap() };
    let envelope = load(a.path());
    assert_eq!(envelope["result"], load(b.path())["result"]);
    assert_eq!(envelope["config"]["seed"], 5);
    assert_eq!(envelope["tool"], "rdlab");
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(rdlab(dir.path(), &["sample", "--n", "5"]).status.code(), Some(2));
    assert_eq!(rdlab(dir.path(), &["no-such-command"]).status.code(), Some(2));
    assert_eq!(rdlab(dir.path(), &["sample", "--n", "4", "--d", "9"]).status.code(), Some(2));
}

#[test]
fn failed_property_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    // four disjoint 2x2 blocks of ones: J = {1, 2} has only 2 in-neighbours
    let input = dir.path().join("blocks.csv");
    let rows: Vec<String> = (0..8)
        .map(|i| (0..8).map(|j| if i / 2 == j / 2 { "1" } else { "0" }).collect::<Vec<_>>().join(","))
        .collect();
    fs::write(&input, rows.join("\n") + "\n").unwrap();
    let input = input.to_str().unwrap();
    let expand = |kappa: &str| rdlab(dir.path(), &["regularity", "--in", input, "--d", "2", "--property", "expansion", "--kappa", kappa]);
    let out = expand("0.6");
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&read(dir.path(), "regularity.json")).unwrap();
    assert_eq!(report["pass"], false);
    let out = expand("0.3");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn enumerate_lists_all_of_a42() {
    let dir = tempfile::tempdir().unwrap();
    let out = rdlab(dir.path(), &["sample", "--n", "4", "--d", "2", "--method", "enumerate"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&read(dir.path(), "sample.json")).unwrap();
    assert_eq!(report["config"]["command"]["subcommand"], "sample");
    assert_eq!(report["result"]["count"], 90);
}
