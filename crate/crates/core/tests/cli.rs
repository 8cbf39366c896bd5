use std::process::{Command, Output};

use univoque::cli::FigureSample;
use univoque::precise::{eval_at, parse_exact, PreciseReal};
use univoque::words::EventuallyPeriodicSeq;

fn univoque(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_univoque")).args(args).env_remove("UNIVOQUE_TOL").output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    univoque(args).status.code().unwrap()
}

#[test]
fn exit_code_contract() {
    assert_eq!(code(&["qs", "2"]), 0);
    assert_eq!(code(&["qs", "1"]), 0);
    assert_eq!(code(&["qs", "0.7"]), 0);
    assert_eq!(code(&["qs", "1,5"]), 2);
    assert_eq!(code(&["qs", "0"]), 2);
    assert_eq!(code(&["--max-level", "2", "qs", "1.03"]), 3);
    assert_eq!(code(&["constants", "--levels", "3"]), 0);
    assert_eq!(code(&["constants", "--levels", "99"]), 2);
    assert_eq!(code(&["figure", "--from", "1.5", "--to", "1.5"]), 2);
    assert_eq!(code(&["figure", "--samples", "3", "--out", "/nonexistent/dir/f.csv"]), 2);
    assert_eq!(code(&["check", "2", "1.5"]), 0);
    assert_eq!(code(&["check", "x", "1.5"]), 2);
    assert_eq!(code(&["expand", "1", "2"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
}

#[test]
fn boundary_inputs_exit_4() {
    // 1e-20 away from the right end of the first gap: 64 bits cannot tell which side
    assert_eq!(code(&["--precision-cap", "64", "qs", "0.81452653224191550664"]), 4);
    assert_eq!(code(&["qs", "0.81452653224191550664"]), 0);
}

#[test]
fn json_output_parses() {
    let out = univoque(&["--json", "qs", "1.2"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["path"], "closed-form-midband");
    assert_eq!(v["gamma"], "1(10)^inf");
    let out = univoque(&["--json", "constants", "--levels", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["name"], "q_1");
}

#[test]
fn environment_overrides_flags() {
    let out = Command::new(env!("CARGO_BIN_EXE_univoque"))
        .args(["qs", "1.03"])
        .env("UNIVOQUE_MAX_LEVEL", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_univoque")).args(["qs", "2"]).env("UNIVOQUE_JSON", "true").output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).starts_with('{'));
}

#[test]
fn output_is_deterministic() {
    for args in [&["figure", "--samples", "40"][..], &["constants"][..], &["qs", "1.03"][..]] {
        let a = univoque(args);
        let b = univoque(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn csv_round_trip() {
    let out = univoque(&["figure", "--from", "0.26", "--to", "4", "--samples", "60"]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_reader(&out.stdout[..]);
    let mut checked = 0;
    for row in reader.deserialize::<FigureSample>() {
        let row = row.unwrap();
        if row.gamma.is_empty() {
            continue;
        }
        let gamma: EventuallyPeriodicSeq = row.gamma.parse().unwrap();
        assert_eq!(gamma.to_string(), row.gamma);
        let q = PreciseReal::from_rational(&parse_exact(&row.q_s).unwrap());
        let x = PreciseReal::from_rational(&parse_exact(&row.x).unwrap());
        let diff = (&eval_at(&gamma, &q).unwrap() - &x).to_f64();
        assert!(diff.abs() <= 1e-11, "x = {}: off by {diff:e}", row.x);
        checked += 1;
    }
    assert!(checked > 40, "{checked}");
}

#[test]
fn documented_command_examples() {
    let text = |args: &[&str]| String::from_utf8(univoque(args).stdout).unwrap();
    assert!(text(&["qs", "2"]).contains("(1)^inf"));
    assert!(text(&["qs", "1"]).contains("1.78723"));
    let gap = text(&["qs", "0.7"]);
    assert!(gap.contains("AboveKL") && gap.lines().any(|l| l.starts_with("gap") && l.contains(" 1 [")), "{gap}");
    let table = text(&["constants"]);
    assert!(table.contains("1.618033"));
    assert!(table.contains("1.0507"));
    assert!(table.lines().any(|l| l.starts_with("gap-3 left") && l.contains("0.236067")));
    assert_eq!(text(&["check", "2", "1.5", "--depth", "60"]).trim(), "Unique (through depth 60)");
    assert_eq!(text(&["check", "3", "1.5"]).trim(), "Infeasible");
    assert_eq!(text(&["expand", "1", "1.754877666", "--digits", "8", "--algorithm", "quasi-greedy"]).trim(), "11001100");
}
