//! Runs the `vsc` binary and checks its output and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn vsc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vsc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vsc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn eval_reports_counts() {
    let o = vsc(&[
        "eval",
        "--strategy",
        "solving",
        "--trace",
        "\\x. (\\z. z) (\\z. z)",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("1: m @ b -> "), "{out}");
    assert!(out.contains("\\x. \\z. z\n"), "{out}");
    assert!(
        out.contains("m=1 e=1 status=normal strategy=solving"),
        "{out}"
    );

    let o = vsc(&["eval", "--fuel", "20", "(\\x. x x) (\\x. x x)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("status=fuel-exhausted"));

    let o = vsc(&["eval", "--strategy", "plotkin", "(\\x. x) (\\y. y)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("beta=1 status=normal"));
}

#[test]
fn parse_errors_exit_with_usage() {
    let o = vsc(&["eval", "\\x."]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
    let o = vsc(&["eval", "@/nonexistent/term.txt"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn terms_from_files() {
    let path = scratch("term.txt");
    std::fs::write(&path, "(\\z. z) (\\z. z)\n").unwrap();
    let arg = format!("@{}", path.display());
    let o = vsc(&["measure", &arg]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "2*1 + 0 = 2 = |Φ|m");
    let o = vsc(&["parse", path.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "(\\z. z) \\z. z");
}

#[test]
fn classify_prints_flags() {
    let o = vsc(&["classify", "x (\\y. y)"]);
    let out = stdout(&o);
    assert!(out.contains("proper_inert=true"), "{out}");
    assert!(out.contains("value=false"), "{out}");
}

#[test]
fn type_then_check() {
    let doc = scratch("d.vscd");
    let o = vsc(&[
        "type",
        "--mode",
        "precise",
        "--out",
        doc.to_str().unwrap(),
        "\\x. (\\z. z) (\\z. z)",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("term\tstrategy"), "{out}");
    assert!(out.contains("\tsolving\t1\t1\t2\t4\ttrue"), "{out}");

    let o = vsc(&["check", doc.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ok (main): "));

    let text = std::fs::read_to_string(&doc).unwrap();
    let broken = scratch("broken.vscd");
    std::fs::write(&broken, text.replacen("\"lam\"", "\"app\"", 1)).unwrap();
    let o = vsc(&["check", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("violation"));
}

#[test]
fn check_neighbouring_fixture() {
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures/kmr_t.vscd");
    let o = vsc(&["check", "--system", "kmr", fixture]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("|- w ((\\x. w') (z y)) : c"));
    let o = vsc(&["check", "--system", "pr", fixture]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn solvability_verdicts() {
    let o = vsc(&["solvable", "x (\\y. (\\w. w w) (\\w. w w))"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Solvable\n"));
    let o = vsc(&["solvable", "--fuel", "100", "\\x. (\\w. w w) (\\w. w w)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("Unsolvable-within-fuel"));
}

#[test]
fn batch_runs() {
    let o = vsc(&[
        "props",
        "--max-nodes",
        "4",
        "--derivation-nodes",
        "3",
        "--samples",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("fail=0"));
    let o = vsc(&["counterexamples"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}
