//! End-to-end tests of the binary: exit codes, stream discipline, and the
//! documented flag surface.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_arrabs"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("arrabs-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_program(name: &str, text: &str) -> PathBuf {
    let path = scratch(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

const SQUARE_PAIRS_MINI: &str = "struct S { unsigned int p; unsigned int q; } a[4]; int i, k;\nmain() { for (i = 0; i < 4; i++) { k = i; a[i].p = k; a[i].q = k * k; } for (i = 0; i < 4; i++) { assert(a[i].q == a[i].p * a[i].p); } }\n";

#[test]
fn no_arguments_prints_usage_and_exits_2() {
    let out = bin().output().expect("runs");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn unknown_flag_exits_2() {
    let out = bin().args(["transform", "--no-such-flag"]).output().expect("runs");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn transform_writes_conformant_output_and_report() {
    let input = write_program("t_in.c", SQUARE_PAIRS_MINI);
    let output = scratch("t_out.c");
    let report = scratch("t_report.json");
    let out = bin()
        .args(["transform"])
        .arg(&input)
        .arg("-o")
        .arg(&output)
        .arg("--report")
        .arg(&report)
        .output()
        .expect("runs");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(&output).unwrap();
    let program = arrabs::parse_transformed(&text).expect("output parses");
    assert!(arrabs::validate_transformed(&program).is_conformant());

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(report["s3"], 2);
    assert_eq!(report["p"], 1);
}

#[test]
fn transform_of_unparseable_input_exits_2() {
    let input = write_program("bad.c", "int a[2][2];");
    let out = bin().arg("transform").arg(&input).output().expect("runs");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn custom_nd_names_appear_in_output() {
    let input = write_program("nd_names.c", SQUARE_PAIRS_MINI);
    let out = bin()
        .arg("transform")
        .arg(&input)
        .args(["--nd-call", "nd_any", "--nd-range-call", "nd_in"])
        .output()
        .expect("runs");
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("nd_in(0, 3)"));
    assert!(text.contains("nd_any()"));
}

#[test]
fn facts_lists_loops_and_assertions() {
    let input = write_program("facts.c", SQUARE_PAIRS_MINI);
    let out = bin().arg("facts").arg(&input).output().expect("runs");
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("array: name=a size=4"));
    assert!(text.lines().filter(|l| l.starts_with("loop:")).count() == 2);
    assert!(text.contains("qualifies=true"));

    let out = bin().arg("facts").arg(&input).arg("--json").output().expect("runs");
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(doc["loops"].as_array().unwrap().len(), 2);
}

#[test]
fn oracle_soundness_holds_on_failing_toy_and_exits_0() {
    let input = write_program(
        "unsafe_toy.c",
        "int a[2]; int i;\nmain() { for (i = 0; i < 2; i++) { a[i] = i; } for (i = 0; i < 2; i++) { assert(a[i] == 0); } }\n",
    );
    let out = bin()
        .args(["oracle", "soundness"])
        .arg(&input)
        .output()
        .expect("runs");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(doc["status"], "Holds");
}

#[test]
fn oracle_accepts_generated_input_by_seed() {
    let out = bin()
        .args(["oracle", "soundness", "--seed", "7"])
        .output()
        .expect("runs");
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert!(doc["status"] == "Holds" || doc["status"] == "Inconclusive");
}

#[test]
fn gen_is_deterministic_and_writes_manifest() {
    let dir1 = scratch("gen1");
    let dir2 = scratch("gen2");
    let manifest = scratch("gen_expect.txt");
    for dir in [&dir1, &dir2] {
        let out = bin()
            .args(["gen", "--seed", "5", "--count", "3", "--out"])
            .arg(dir)
            .arg("--manifest")
            .arg(&manifest)
            .output()
            .expect("runs");
        assert_eq!(out.status.code(), Some(0));
    }
    for k in 5..8 {
        let name = format!("gen_{k:06}.c");
        let a = std::fs::read_to_string(dir1.join(&name)).unwrap();
        let b = std::fs::read_to_string(dir2.join(&name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
    let manifest = std::fs::read_to_string(&manifest).unwrap();
    assert!(manifest.lines().count() <= 3);
    for line in manifest.lines() {
        assert!(line.ends_with(" safe") || line.ends_with(" unsafe"));
    }
}

#[test]
fn suite_flags_incorrect_rows_with_exit_1() {
    let dir = scratch("suite_corpus");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(
        dir.join("p0.c"),
        "int a[2]; int i;\nmain() { for (i = 0; i < 2; i++) { a[i] = i; assert(a[i] == i); } }\n",
    )
    .unwrap();
    let manifest = scratch("suite_expect.txt");
    std::fs::write(&manifest, "p0.c safe\n").unwrap();

    // A tool that reports failure everywhere turns the safe program into
    // an incorrect-false row.
    let out = bin()
        .arg("suite")
        .arg(&dir)
        .args(["--bmc", "sh -c 'cat {file} > /dev/null; echo VERIFICATION FAILED'"])
        .arg("--expect")
        .arg(&manifest)
        .output()
        .expect("runs");
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("name,expected,verdict,seconds,precise"));

    let out = bin()
        .arg("suite")
        .arg(&dir)
        .args(["--bmc", "sh -c 'cat {file} > /dev/null; echo VERIFICATION SUCCESSFUL'"])
        .arg("--expect")
        .arg(&manifest)
        .output()
        .expect("runs");
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("p0.c,safe,safe"));
}

#[test]
fn suite_writes_reports_to_declared_paths_only() {
    let dir = scratch("suite_out");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("p.c"), "int x;\nmain() { x = 1; assert(x == 1); }\n").unwrap();
    let csv = scratch("report.csv");
    let json = scratch("report.json");
    let out = bin()
        .arg("suite")
        .arg(&dir)
        .args(["--bmc", "sh -c 'cat {file} > /dev/null; echo VERIFICATION SUCCESSFUL'"])
        .arg("--out")
        .arg(&csv)
        .arg("--json-out")
        .arg(&json)
        .output()
        .expect("runs");
    assert_eq!(out.status.code(), Some(0));
    assert!(Path::new(&csv).exists());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["counts"]["programs"], 1);
}
