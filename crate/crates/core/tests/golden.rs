use std::path::PathBuf;

use linten::harness::{emit_report, parse_report, run_experiment, ExperimentConfig, ReportFormat};

const CONFIG: &str = r#"
tester = "auto"
trials = 500
seed = 20
[instance]
kind = "far"
n = 10
eps = 0.1
seed = 4
[adversary]
strategy = "pair_eraser"
kind = "corruption"
rate = "fixed_rate"
t = 1.5
[params]
eps = 0.1
check_regime = false
"#;

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/auto_far_pair_corruption.json")
}

#[test]
fn report_matches_frozen_output() {
    let cfg = ExperimentConfig::from_toml_str(CONFIG).unwrap();
    let json = emit_report(&run_experiment(&cfg).unwrap(), ReportFormat::Json).unwrap();
    let path = golden_path();
    if std::env::var_os("LINTEN_BLESS").is_some() {
        std::fs::write(&path, &json).unwrap();
    }
    let frozen = std::fs::read(&path).expect("golden file present; set LINTEN_BLESS=1 to create it");
    assert_eq!(String::from_utf8_lossy(&json), String::from_utf8_lossy(&frozen));
    assert_eq!(parse_report(&frozen).unwrap(), parse_report(&json).unwrap());
}
