use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::config::ReportFormat;
use crate::harness::stats::{BoundCheck, Interval};

/// Aggregated outcome of an experiment. All floats carry at most 12
/// significant digits, so emitting and re-parsing is lossless.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub tester: String,
    pub instance: String,
    pub adversary: String,
    pub trials: u64,
    pub seed: u64,
    pub accepts: u64,
    pub rejects: u64,
    pub accept_rate: f64,
    pub accept_ci: Interval,
    pub mean_queries: f64,
    pub max_queries: u64,
    /// Tester iterations (or rounds) over all trials.
    pub iterations: u64,
    /// Iterations that saw at least one erased answer.
    pub erased_iterations: u64,
    /// Trials in which some fresh query landed on a manipulated cell.
    pub trials_with_manipulated_hits: u64,
    pub manipulated_hits: u64,
    /// Set for illustrative experiments whose outcome is not a general guarantee.
    pub demonstrative: bool,
    pub bounds: Vec<BoundCheck>,
}

impl TrialReport {
    pub fn all_passed(&self) -> bool {
        self.bounds.iter().all(|b| b.passed)
    }

    /// Rounds every float to 12 significant digits.
    pub fn normalized(mut self) -> Self {
        let r = round12;
        self.accept_rate = r(self.accept_rate);
        self.accept_ci = round_interval(self.accept_ci);
        self.mean_queries = r(self.mean_queries);
        for b in &mut self.bounds {
            b.bound = r(b.bound);
            b.empirical = r(b.empirical);
            b.ci = round_interval(b.ci);
        }
        self
    }
}

pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

pub(crate) fn round_interval(i: Interval) -> Interval {
    Interval {
        lo: round12(i.lo),
        hi: round12(i.hi),
    }
}

pub const CSV_HEADER: &str = "tester,instance,adversary,trials,seed,accepts,rejects,accept_rate,accept_ci_lo,accept_ci_hi,\
mean_queries,max_queries,iterations,erased_iterations,trials_with_manipulated_hits,demonstrative,\
check,relation,bound,empirical,check_ci_lo,check_ci_hi,passed";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn emit_report(report: &TrialReport, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report).map_err(|e| Error::Internal(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        ReportFormat::Csv => {
            let head = [
                csv_field(&report.tester),
                csv_field(&report.instance),
                csv_field(&report.adversary),
                report.trials.to_string(),
                report.seed.to_string(),
                report.accepts.to_string(),
                report.rejects.to_string(),
                report.accept_rate.to_string(),
                report.accept_ci.lo.to_string(),
                report.accept_ci.hi.to_string(),
                report.mean_queries.to_string(),
                report.max_queries.to_string(),
                report.iterations.to_string(),
                report.erased_iterations.to_string(),
                report.trials_with_manipulated_hits.to_string(),
                report.demonstrative.to_string(),
            ]
            .join(",");
            let mut out = format!("{CSV_HEADER}\n");
            if report.bounds.is_empty() {
                out.push_str(&format!("{head},,,,,,,\n"));
            }
            for b in &report.bounds {
                let rel = serde_json::to_value(b.relation).map_err(|e| Error::Internal(e.to_string()))?;
                out.push_str(&format!(
                    "{head},{},{},{},{},{},{},{}\n",
                    csv_field(&b.name),
                    rel.as_str().unwrap_or_default(),
                    b.bound,
                    b.empirical,
                    b.ci.lo,
                    b.ci.hi,
                    b.passed
                ));
            }
            Ok(out.into_bytes())
        }
    }
}

pub fn parse_report(json: &[u8]) -> Result<TrialReport> {
    serde_json::from_slice(json).map_err(|e| Error::Parse(e.to_string()))
}
