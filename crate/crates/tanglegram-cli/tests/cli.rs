//! End-to-end checks of the command-line interface.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tanglegram"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn gen_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["one", "two"] {
        let out = run(
            &[
                "gen",
                "--set",
                "A",
                "--n",
                "16",
                "--count",
                "10",
                "--seed",
                "7",
                "--out-dir",
                sub,
            ],
            dir.path(),
        );
        assert!(out.status.success());
    }
    for i in 0..10 {
        let name = format!("A-n16-{i:03}.tgl");
        let a = fs::read(dir.path().join("one").join(&name)).unwrap();
        let b = fs::read(dir.path().join("two").join(&name)).unwrap();
        assert_eq!(a, b, "{name}");
        assert!(!a.is_empty());
    }
}

#[test]
fn solve_reports_proved_optimum_on_identity() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("identity.tgl"), "(a,b);\n(a,b);\n").unwrap();
    let out = run(&["solve", "--algo", "exact", "identity.tgl"], dir.path());
    assert_eq!(stdout_of(&out).trim(), "crossings: 0, optimal: proved");
}

#[test]
fn solve_heuristics_print_crossings() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("crossed.tgl"), "(a,b);\n(b,a);\n").unwrap();
    for algo in [
        "rec-split",
        "rec-split-improved",
        "rec-split-bb",
        "hierarchy-sort",
    ] {
        let out = run(&["solve", "--algo", algo, "crossed.tgl"], dir.path());
        assert_eq!(stdout_of(&out).trim(), "crossings: 0", "{algo}");
    }
}

#[test]
fn bench_emits_one_row_per_instance_and_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "bench",
            "--set",
            "B",
            "--n",
            "16",
            "--count",
            "10",
            "--seed",
            "11",
            "--csv",
            "out.csv",
            "--summary",
            "summary.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("out.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "instance,set,n,algorithm,crossings,c_opt,proved_optimal,ratio,time_ms,seed"
    );
    assert_eq!(lines.count(), 10 * 5, "10 instances x 5 algorithms");

    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.starts_with("set,n,algorithm,count,min,q1,median,q3,max,mean"));
    assert_eq!(summary.lines().count(), 1 + 5, "one row per algorithm");
}

#[test]
fn bench_reads_instance_directories() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &[
            "gen",
            "--set",
            "C",
            "--n",
            "10",
            "--count",
            "3",
            "--seed",
            "5",
            "--out-dir",
            "insts",
        ],
        dir.path(),
    );
    let out = run(
        &[
            "bench",
            "--instances",
            "insts",
            "--algos",
            "rec-split-bb,exact",
            "--csv",
            "out.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 2);
}

#[test]
fn render_writes_one_line_per_leaf() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.tgl"), "((a,b),(c,d));\n((d,c),(b,a));\n").unwrap();
    let out = run(
        &[
            "render",
            "t.tgl",
            "--algo",
            "rec-split-bb",
            "--out",
            "t.svg",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let svg = fs::read_to_string(dir.path().join("t.svg")).unwrap();
    assert_eq!(svg.matches("<line").count(), 4);
    assert!(svg.starts_with("<svg"));
}

#[test]
fn bad_inputs_exit_nonzero_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    // Missing file.
    let out = run(&["solve", "nope.tgl"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    // Non-binary tree.
    fs::write(dir.path().join("bad.tgl"), "(a,b,c);\n(a,b);\n").unwrap();
    let out = run(&["solve", "bad.tgl"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("binary"));

    // Unknown algorithm.
    fs::write(dir.path().join("ok.tgl"), "(a,b);\n(a,b);\n").unwrap();
    let out = run(&["solve", "--algo", "magic", "ok.tgl"], dir.path());
    assert!(!out.status.success());

    // Set A with a non-power-of-two size.
    let out = run(
        &[
            "gen", "--set", "A", "--n", "12", "--count", "1", "--seed", "1",
        ],
        dir.path(),
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("power-of-two"));
}
