use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const FULL2: &str = "p cnf 2 4\n1 2 0\n-1 2 0\n1 -2 0\n-1 -2 0\n";

fn dratkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dratkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn file(dir: &TempDir, name: &str, contents: &[u8]) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn check_drat_verifies_and_rejects() {
    let dir = TempDir::new().unwrap();
    let cnf = file(&dir, "f.cnf", FULL2.as_bytes());
    let good = file(&dir, "p.drat", b"1 0\n0\n");
    let broken = file(&dir, "broken.drat", b"2 0\n1 -2 0\n");

    let out = dratkit(&["check", "drat", s(&cnf), s(&good)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "s VERIFIED\n");

    let out = dratkit(&["check", "drat", s(&cnf), s(&broken)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "s NOT VERIFIED\n");
}

#[test]
fn deletion_semantics_flag() {
    let dir = TempDir::new().unwrap();
    let cnf = file(&dir, "f.cnf", b"p cnf 1 2\n1 0\n-1 0\n");
    let proof = file(&dir, "p.drat", b"d 1 0\n0\n");
    let operational = dratkit(&["check", "drat", s(&cnf), s(&proof), "--mode", "operational"]);
    assert_eq!(operational.status.code(), Some(0));
    let specified = dratkit(&["check", "drat", s(&cnf), s(&proof), "--mode", "specified", "--counters"]);
    assert_eq!(specified.status.code(), Some(1));
    assert!(stdout(&specified).starts_with("s NOT VERIFIED\n"));
}

#[test]
fn binary_proofs() {
    let dir = TempDir::new().unwrap();
    let cnf = file(&dir, "f.cnf", FULL2.as_bytes());
    // a {1}, a {}
    let proof = file(&dir, "p.bin", &[0x61, 0x02, 0x00, 0x61, 0x00]);
    assert_eq!(dratkit(&["check", "drat", s(&cnf), s(&proof)]).status.code(), Some(0));
    assert_eq!(dratkit(&["check", "drat", s(&cnf), s(&proof), "--binary"]).status.code(), Some(0));
    assert_eq!(dratkit(&["check", "drat", s(&cnf), s(&proof), "--text"]).status.code(), Some(2));
}

#[test]
fn trim_then_check_lrat() {
    let dir = TempDir::new().unwrap();
    let cnf = file(&dir, "f.cnf", FULL2.as_bytes());
    let proof = file(&dir, "p.drat", b"1 2 0\n1 0\n0\n");
    let lrat = dir.path().join("p.lrat");
    let drat = dir.path().join("t.drat");
    let core = dir.path().join("core.cnf");
    let out = dratkit(&[
        "trim", s(&cnf), s(&proof), "--out-lrat", s(&lrat), "--out-drat", s(&drat), "--out-core", s(&core),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(&lrat).unwrap(), "5 1 0 1 3 0\n6 0 5 2 4 0\n");
    assert_eq!(fs::read_to_string(&drat).unwrap(), "1 0\n0\n");
    assert_eq!(dratkit(&["check", "lrat", s(&cnf), s(&lrat)]).status.code(), Some(0));
    assert_eq!(dratkit(&["check", "drat", s(&core), s(&drat)]).status.code(), Some(0));
}

#[test]
fn trim_refuses_invalid_proofs() {
    let dir = TempDir::new().unwrap();
    let cnf = file(&dir, "f.cnf", FULL2.as_bytes());
    let proof = file(&dir, "p.drat", b"2 0\n");
    let lrat = dir.path().join("p.lrat");
    let out = dratkit(&["trim", s(&cnf), s(&proof), "--out-lrat", s(&lrat)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!lrat.exists());
}

#[test]
fn solve_translate_and_check_pigeonhole() {
    let dir = TempDir::new().unwrap();
    let cnf = dir.path().join("php.cnf");
    let proof = dir.path().join("php.drat");
    let er = dir.path().join("php.er");
    assert_eq!(dratkit(&["gen", "php", "3", "--out", s(&cnf)]).status.code(), Some(0));
    assert!(fs::read_to_string(&cnf).unwrap().starts_with("p cnf 12 22\n"));

    let out = dratkit(&["solve", s(&cnf), "--proof", s(&proof), "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("s UNSATISFIABLE\n"));

    assert_eq!(dratkit(&["to-er", s(&cnf), s(&proof), "--out", s(&er)]).status.code(), Some(0));
    assert_eq!(dratkit(&["check", "er", s(&cnf), s(&er)]).status.code(), Some(0));
}

#[test]
fn solve_satisfiable() {
    let dir = TempDir::new().unwrap();
    let cnf = file(&dir, "f.cnf", b"p cnf 2 1\n1 2 0\n");
    let out = dratkit(&["solve", s(&cnf)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("s SATISFIABLE\nv "));
    let model = text.lines().nth(1).unwrap();
    assert!(model.split_whitespace().any(|t| t == "1" || t == "2"));
}

#[test]
fn counters_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let cnf = dir.path().join("r.cnf");
    let proof = dir.path().join("r.drat");
    let gen = dratkit(&["gen", "random", "--vars", "30", "--clauses", "150", "--width", "3", "--seed", "4", "--out", s(&cnf)]);
    assert_eq!(gen.status.code(), Some(0));
    dratkit(&["solve", s(&cnf), "--proof", s(&proof)]);
    let runs: Vec<Vec<u8>> = (0..3)
        .map(|_| dratkit(&["check", "drat", s(&cnf), s(&proof), "--counters"]).stdout)
        .collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
    assert!(String::from_utf8_lossy(&runs[0]).contains("c visited_clauses "));
}

#[test]
fn usage_and_parse_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let cnf = file(&dir, "f.cnf", b"p cnf 2 1\n1 x 0\n");
    let proof = file(&dir, "p.drat", b"0\n");
    assert_eq!(dratkit(&["check", "drat", s(&cnf), s(&proof)]).status.code(), Some(2));
    assert_eq!(dratkit(&["check", "drat"]).status.code(), Some(2));
    assert_eq!(dratkit(&["check", "drat", "missing.cnf", "missing.drat"]).status.code(), Some(2));
    assert_eq!(dratkit(&["gen", "php", "0"]).status.code(), Some(2));
}

#[test]
fn batch_reports_each_file() {
    let dir = TempDir::new().unwrap();
    file(&dir, "f.cnf", FULL2.as_bytes());
    file(&dir, "good.drat", b"1 0\n0\n");
    file(&dir, "bad.drat", b"2 0\n");
    file(&dir, "good.lrat", b"5 1 0 1 3 0\n6 0 5 2 4 0\n");
    let list = file(&dir, "list", b"drat f.cnf good.drat\nlrat f.cnf good.lrat\ndrat f.cnf bad.drat\n");
    let out = dratkit(&["batch", s(&list), "--jobs", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let lines: Vec<String> = stdout(&out).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].ends_with("good.drat VERIFIED"));
    assert!(lines[1].ends_with("good.lrat VERIFIED"));
    assert!(lines[2].ends_with("bad.drat NOT VERIFIED"));
}
