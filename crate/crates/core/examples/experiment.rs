//! A full experiment from a TOML description, reported as JSON.

use linten::harness::{emit_report, run_experiment, ExperimentConfig, ReportFormat};

const CONFIG: &str = r#"
tester = "auto"
trials = 2000
seed = 1
[instance]
kind = "far"
n = 12
eps = 0.1
[adversary]
strategy = "pair_eraser"
kind = "erasure"
rate = "fixed_rate"
t = 2.0
[params]
eps = 0.1
check_regime = false
"#;

fn main() -> linten::Result<()> {
    let cfg = ExperimentConfig::from_toml_str(CONFIG)?;
    let report = run_experiment(&cfg)?;
    println!("{}", String::from_utf8_lossy(&emit_report(&report, ReportFormat::Json)?));
    println!("all bounds passed: {}", report.all_passed());
    Ok(())
}
