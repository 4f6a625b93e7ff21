use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2::PointF2;

/// Default constant `c` in the admissible-rate condition `t <= c * min(eps^2, 1/n^2) * 2^n`.
pub const DEFAULT_REGIME_CONSTANT: f64 = 1.0 / (1u64 << 20) as f64;

/// Batch size `m = 4 * ceil(log2(t) + 10/eps)`, with `log2(t)` clamped at 0 for `t < 1`.
pub fn batch_size(eps: f64, t: f64) -> u32 {
    let log_t = if t >= 1.0 { t.log2() } else { 0.0 };
    4 * (log_t + 10.0 / eps - 1e-9).ceil() as u32
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// `m <= n/3`: the batch-XOR tester.
    One,
    /// `m > n/3`: sample-based testing.
    Two,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TesterParams {
    pub eps: f64,
    pub t: f64,
    pub n: u32,
    pub regime_constant: f64,
    /// Reject manipulation rates outside the admissible regime in the dispatcher.
    pub check_regime: bool,
    /// Run the batch-XOR tester even when `m > n/3`.
    pub force_case_one: bool,
    /// Iterations of the batch-XOR tester.
    pub online_iterations: u32,
    /// Samples beyond `n` drawn for the span step of the sample-based tester.
    pub sample_slack: u32,
    /// Comparison samples are `ceil(comparison_factor / eps)`.
    pub comparison_factor: f64,
}

impl Default for TesterParams {
    fn default() -> Self {
        Self {
            eps: 0.1,
            t: 0.0,
            n: 16,
            regime_constant: DEFAULT_REGIME_CONSTANT,
            check_regime: true,
            force_case_one: false,
            online_iterations: 6,
            sample_slack: 7,
            comparison_factor: 3.0,
        }
    }
}

impl TesterParams {
    pub fn new(n: u32, eps: f64, t: f64) -> Self {
        Self {
            n,
            eps,
            t,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        PointF2::zero(self.n)?;
        if !(self.eps > 0.0 && self.eps <= 0.5) {
            return Err(Error::InvalidParameter(format!("eps = {} must lie in (0, 1/2]", self.eps)));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(Error::InvalidParameter(format!("t = {} must be finite and >= 0", self.t)));
        }
        if self.online_iterations == 0 || self.comparison_factor <= 0.0 {
            return Err(Error::InvalidParameter("iteration counts must be positive".into()));
        }
        Ok(())
    }

    pub fn batch_size(&self) -> u32 {
        batch_size(self.eps, self.t)
    }

    pub fn case(&self) -> Case {
        if 3 * self.batch_size() as u64 <= self.n as u64 {
            Case::One
        } else {
            Case::Two
        }
    }

    /// `c * min(eps^2, 1/n^2) * 2^n`.
    pub fn regime_bound(&self) -> f64 {
        let n = self.n as f64;
        self.regime_constant * (self.eps * self.eps).min(1.0 / (n * n)) * n.exp2()
    }

    pub fn check_admissible(&self) -> Result<()> {
        let bound = self.regime_bound();
        if self.check_regime && self.t > bound {
            return Err(Error::InadmissibleRate {
                t: self.t,
                bound,
                c: self.regime_constant,
            });
        }
        Ok(())
    }

    pub fn sample_count(&self) -> u32 {
        self.n + self.sample_slack
    }

    pub fn comparison_count(&self) -> u32 {
        (self.comparison_factor / self.eps - 1e-9).ceil() as u32
    }

    /// Rounds of the repeated 3-point and k-point testers: `ceil(3/eps)`.
    pub fn repetition_count(&self) -> u32 {
        (3.0 / self.eps - 1e-9).ceil() as u32
    }

    /// `max(1/eps, log2 t, 1)`, the scale against which query counts are reported.
    pub fn query_scale(&self) -> f64 {
        (1.0 / self.eps).max(if self.t > 1.0 { self.t.log2() } else { 0.0 }).max(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TesterId {
    Blr3,
    Kpoint,
    Online,
    Sample,
    Auto,
}

impl TesterId {
    pub const ALL: [TesterId; 5] = [Self::Blr3, Self::Kpoint, Self::Online, Self::Sample, Self::Auto];

    pub fn name(self) -> &'static str {
        match self {
            Self::Blr3 => "blr3",
            Self::Kpoint => "kpoint",
            Self::Online => "online",
            Self::Sample => "sample",
            Self::Auto => "auto",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Self::Blr3 => "repeated 3-point test, ceil(3/eps) rounds, erasures count as passes",
            Self::Kpoint => "repeated k-point test (k even), ceil(3/eps) rounds",
            Self::Online => "batch-XOR erasure-resilient tester, 6 iterations of m+1 queries (needs m <= n/3)",
            Self::Sample => "sample-based span/compare tester, accepts on any erased sample",
            Self::Auto => "dispatcher: batch-XOR tester when m <= n/3, sample-based otherwise",
        }
    }
}

impl fmt::Display for TesterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TesterId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown tester {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batch_size_formula() {
        assert_eq!(batch_size(0.1, 1024.0), 440);
        assert_eq!(batch_size(0.5, 2.0), 84);
        assert_eq!(batch_size(0.25, 65536.0), 224);
        assert_eq!(batch_size(0.5, 16.0), 96);
        assert_eq!(batch_size(0.5, 0.3), 80);
        assert_eq!(batch_size(0.5, 0.0), 80);
    }

    #[test]
    fn case_dispatch_examples() {
        assert_eq!(TesterParams::new(60, 0.1, 1024.0).case(), Case::Two);
        assert_eq!(TesterParams::new(24, 0.5, 2.0).case(), Case::Two);
        assert_eq!(TesterParams::new(300, 0.25, 65536.0).case(), Case::Two);
        assert_eq!(TesterParams::new(300, 0.5, 16.0).case(), Case::One);
        assert_eq!(TesterParams::new(288, 0.5, 16.0).case(), Case::One);
        assert_eq!(TesterParams::new(287, 0.5, 16.0).case(), Case::Two);
    }

    #[test]
    fn regime_bound_and_admissibility() {
        let mut p = TesterParams::new(16, 0.25, 0.0);
        assert!((p.regime_bound() - 65536.0 / 256.0 / (1u64 << 20) as f64).abs() < 1e-15);
        p.t = 1.0;
        assert!(matches!(p.check_admissible(), Err(Error::InadmissibleRate { .. })));
        p.check_regime = false;
        assert!(p.check_admissible().is_ok());
    }

    #[test]
    fn counts() {
        let p = TesterParams::new(16, 0.25, 0.0);
        assert_eq!(p.sample_count(), 23);
        assert_eq!(p.comparison_count(), 12);
        assert_eq!(TesterParams::new(16, 0.1, 0.0).comparison_count(), 30);
        assert_eq!(TesterParams::new(16, 0.1, 0.0).repetition_count(), 30);
    }

    #[test]
    fn tester_ids_parse() {
        for id in TesterId::ALL {
            assert_eq!(id.name().parse::<TesterId>().unwrap(), id);
        }
        assert!("blr4".parse::<TesterId>().is_err());
    }
}
