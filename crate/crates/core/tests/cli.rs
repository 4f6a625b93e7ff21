use std::io::Write;
use std::process::{Command, Output};

use linten::harness::{parse_report, CSV_HEADER};

fn linten(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linten"))
        .args(args)
        .env("LINTEN_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn listings() {
    let out = linten(&["list-testers"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["blr3", "kpoint", "online", "sample", "auto", "real-additivity", "low-degree"] {
        assert!(text.contains(name), "{name} missing from {text}");
    }
    let out = linten(&["list-adversaries"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["null", "pair_eraser", "subset_eraser"] {
        assert!(text.contains(name), "{name} missing from {text}");
    }
}

#[test]
fn boolean_verb_reports_json() {
    let out = linten(&["blr3", "--n", "10", "--eps", "0.1", "--instance", "linear", "--trials", "200", "--seed", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = parse_report(&out.stdout).unwrap();
    assert_eq!((report.trials, report.accepts), (200, 200));
    assert!(report.all_passed());
    assert!(String::from_utf8_lossy(&out.stderr).contains("PASS"));
}

#[test]
fn csv_format() {
    let out = linten(&[
        "sample",
        "--n",
        "12",
        "--eps",
        "0.1",
        "--t",
        "1",
        "--adversary",
        "pair-eraser",
        "--rate",
        "fixed-rate",
        "--no-regime-check",
        "--trials",
        "100",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
}

#[test]
fn failed_bound_exits_one() {
    let out = linten(&[
        "real-additivity",
        "--fn",
        "additive(1,2)",
        "--dist",
        "gaussian(2)",
        "--expect-far",
        "--trials",
        "50",
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&linten(&["blr3"])), 2);
    assert_eq!(code(&linten(&["no-such-verb"])), 2);
    assert_eq!(code(&linten(&["blr3", "--n", "10", "--eps", "0.9"])), 2);
    assert_eq!(code(&linten(&["run", "/nonexistent/config.toml"])), 2);
}

#[test]
fn run_config_file() {
    let mut file = tempfile::Builder::new().suffix(".toml").tempfile().unwrap();
    write!(
        file,
        r#"
tester = "low-degree"
trials = 20
seed = 2
[instance]
kind = "real"
function = "poly(2; 1:2,0; -0.5:1,1; 3:0,0)"
distribution = "gaussian(2)"
[params]
d = 2
eps = 0.2
"#
    )
    .unwrap();
    let out = linten(&["run", file.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(parse_report(&out.stdout).unwrap().accepts, 20);
}

#[test]
fn table_fixture() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    // x1 XOR x3 on three variables, indexed little-endian.
    write!(file, "n=3\n01011010\n").unwrap();
    let out = linten(&[
        "kpoint",
        "--n",
        "3",
        "--eps",
        "0.25",
        "--table",
        file.path().to_str().unwrap(),
        "--trials",
        "50",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(parse_report(&out.stdout).unwrap().accepts, 50);
}

#[test]
fn impossibility_demo_runs() {
    let out = linten(&["demo", "impossibility", "--n", "10", "--eps", "0.125", "--trials", "300", "--profile-trials", "200"]);
    let code = code(&out);
    assert!(code == 0 || code == 1, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"demonstrative\": true"), "{text}");
}
