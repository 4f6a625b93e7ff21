use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{ManipulationKind, RateMode};
use crate::real::{Distribution, Tolerance, ZooFunction};
use crate::testers::{TesterId, DEFAULT_REGIME_CONSTANT};

/// Every tester the harness can drive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentTester {
    Blr3,
    Kpoint,
    Online,
    Sample,
    Auto,
    RealAdditivity,
    LowDegree,
}

impl ExperimentTester {
    pub const ALL: [ExperimentTester; 7] = [
        Self::Blr3,
        Self::Kpoint,
        Self::Online,
        Self::Sample,
        Self::Auto,
        Self::RealAdditivity,
        Self::LowDegree,
    ];

    /// The Boolean tester behind this id, if any.
    pub fn f2(self) -> Option<TesterId> {
        match self {
            Self::Blr3 => Some(TesterId::Blr3),
            Self::Kpoint => Some(TesterId::Kpoint),
            Self::Online => Some(TesterId::Online),
            Self::Sample => Some(TesterId::Sample),
            Self::Auto => Some(TesterId::Auto),
            Self::RealAdditivity | Self::LowDegree => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self.f2() {
            Some(id) => id.name(),
            None if self == Self::RealAdditivity => "real-additivity",
            None => "low-degree",
        }
    }

    pub fn describe(self) -> &'static str {
        match self.f2() {
            Some(id) => id.describe(),
            None if self == Self::RealAdditivity => {
                "additivity over R^n: characterization rounds, then ceil(4/eps) single-direction comparisons"
            }
            None => "degree-d polynomials over R^n: finite-difference characterization, then radial-extrapolation comparisons",
        }
    }
}

impl fmt::Display for ExperimentTester {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentTester {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('_', "-");
        Self::ALL
            .into_iter()
            .find(|t| t.name() == norm)
            .ok_or_else(|| Error::Parse(format!("unknown tester {s:?}")))
    }
}

/// A zoo function, either as its short text form or as a tagged descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Text(String),
    Descriptor(ZooFunction),
}

impl FunctionSpec {
    pub fn resolve(&self) -> Result<ZooFunction> {
        match self {
            Self::Text(s) => s.parse(),
            Self::Descriptor(f) => {
                f.validate()?;
                Ok(f.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistributionSpec {
    Text(String),
    Descriptor(Distribution),
}

impl DistributionSpec {
    pub fn resolve(&self) -> Result<Distribution> {
        match self {
            Self::Text(s) => s.parse(),
            Self::Descriptor(d) => {
                d.validate()?;
                Ok(d.clone())
            }
        }
    }
}

/// The function under test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceSpec {
    /// A random linear function; any `n` up to 65536.
    Linear {
        n: u32,
        #[serde(default)]
        seed: u64,
    },
    /// A function at certified distance `⌈eps 2^n⌉ / 2^n` from linearity.
    Far {
        n: u32,
        eps: f64,
        #[serde(default)]
        seed: u64,
    },
    /// A random linear function XOR an AND of `k` coordinates (distance `2^-k`).
    JuntaFar {
        n: u32,
        k: u32,
        #[serde(default)]
        seed: u64,
    },
    /// `1 + x_1` (distance 1/2).
    AffineX1 { n: u32 },
    /// A truth table in the `n=<int>` text format.
    Table { path: PathBuf },
    /// A function over `R^n` with a distribution over its inputs.
    Real {
        function: FunctionSpec,
        distribution: DistributionSpec,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyId {
    Null,
    PairEraser,
    SubsetEraser,
}

impl StrategyId {
    pub const ALL: [StrategyId; 3] = [Self::Null, Self::PairEraser, Self::SubsetEraser];

    pub fn name(self) -> &'static str {
        match self {
            Self::Null => "null",
            Self::PairEraser => "pair_eraser",
            Self::SubsetEraser => "subset_eraser",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Self::Null => "never manipulates",
            Self::PairEraser => "after each query, manipulates x XOR y for the newest queried pairs first",
            Self::SubsetEraser => {
                "before the last query of each m+1 batch, manipulates the XOR of every (m/2)-subset of the batch"
            }
        }
    }
}

impl FromStr for StrategyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|a| a.name() == norm)
            .ok_or_else(|| Error::Parse(format!("unknown adversary {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdversarySpec {
    pub strategy: StrategyId,
    pub kind: ManipulationKind,
    pub rate: RateMode,
    pub t: f64,
}

impl Default for AdversarySpec {
    fn default() -> Self {
        Self {
            strategy: StrategyId::Null,
            kind: ManipulationKind::Erasure,
            rate: RateMode::BudgetManaging,
            t: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentParams {
    pub eps: f64,
    /// Points per round of the k-point tester.
    pub k: u32,
    /// Degree for the low-degree tester.
    pub d: u32,
    pub check_regime: bool,
    pub regime_constant: f64,
    pub force_case_one: bool,
    /// Characterization rounds of the additivity tester.
    pub n6: usize,
    /// Characterization rounds of the low-degree tester (default `⌈8d²⌉`).
    pub n8: Option<usize>,
    /// Comparison iterations of the real testers (default `⌈4/ε⌉`).
    pub comparisons: Option<usize>,
    pub tol_abs: f64,
    pub tol_rel: f64,
    /// Registers a soundness check for real instances whose farness is known
    /// only by construction.
    pub expect_far: bool,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        let tol = Tolerance::default();
        Self {
            eps: 0.1,
            k: 4,
            d: 1,
            check_regime: true,
            regime_constant: DEFAULT_REGIME_CONSTANT,
            force_case_one: false,
            n6: crate::real::additivity::DEFAULT_CHARACTERIZATION_ROUNDS,
            n8: None,
            comparisons: None,
            tol_abs: tol.abs,
            tol_rel: tol.rel,
            expect_far: false,
        }
    }
}

impl ExperimentParams {
    pub fn tolerance(&self) -> Tolerance {
        Tolerance {
            abs: self.tol_abs,
            rel: self.tol_rel,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::Parse(format!("unknown report format {other:?}; expected json or csv"))),
        }
    }
}

/// A complete, replayable experiment description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub tester: ExperimentTester,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    pub instance: InstanceSpec,
    #[serde(default)]
    pub adversary: AdversarySpec,
    #[serde(default)]
    pub params: ExperimentParams,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: ReportFormat,
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    /// Loads a `.json` file as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg = if path.extension().is_some_and(|e| e == "json") {
            Self::from_json_str(&text)?
        } else {
            Self::from_toml_str(&text)?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        let real_instance = matches!(self.instance, InstanceSpec::Real { .. });
        if real_instance != self.tester.f2().is_none() {
            return Err(Error::Config(format!(
                "tester {} cannot run on a {} instance",
                self.tester,
                if real_instance { "real-valued" } else { "Boolean" }
            )));
        }
        if real_instance && self.adversary.strategy != StrategyId::Null {
            return Err(Error::Config("real-valued testers run without an adversary".into()));
        }
        let p = &self.params;
        if !(p.tol_abs >= 0.0 && p.tol_rel >= 0.0) {
            return Err(Error::Config("tolerances must be non-negative".into()));
        }
        if self.tester == ExperimentTester::Kpoint && (p.k < 2 || p.k % 2 == 1) {
            return Err(Error::Config(format!("k = {} must be even and at least 2", p.k)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_agree() {
        let toml_cfg = ExperimentConfig::from_toml_str(
            r#"
            tester = "auto"
            trials = 100
            seed = 3
            [instance]
            kind = "far"
            n = 12
            eps = 0.1
            [adversary]
            strategy = "pair_eraser"
            kind = "erasure"
            rate = "fixed_rate"
            t = 2.5
            [params]
            eps = 0.1
            check_regime = false
            "#,
        )
        .unwrap();
        let json = serde_json::to_string(&toml_cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json_str(&json).unwrap(), toml_cfg);
        assert_eq!(toml_cfg.adversary.strategy, StrategyId::PairEraser);
        assert!(!toml_cfg.params.check_regime);
        assert_eq!(toml_cfg.params.k, 4);
        toml_cfg.validate().unwrap();
    }

    #[test]
    fn real_instances_accept_text_or_descriptor() {
        let cfg = ExperimentConfig::from_toml_str(
            r#"
            tester = "real-additivity"
            trials = 10
            [instance]
            kind = "real"
            function = { kind = "additive", c = [1.0, 2.0] }
            distribution = "gaussian(2)"
            "#,
        )
        .unwrap();
        let InstanceSpec::Real { function, distribution } = &cfg.instance else {
            panic!("expected a real instance");
        };
        assert_eq!(function.resolve().unwrap(), "additive(1,2)".parse().unwrap());
        assert_eq!(distribution.resolve().unwrap().dim(), 2);
    }

    #[test]
    fn validation_errors() {
        let mut cfg = ExperimentConfig {
            tester: ExperimentTester::LowDegree,
            trials: 1,
            seed: 0,
            instance: InstanceSpec::Linear { n: 8, seed: 0 },
            adversary: AdversarySpec::default(),
            params: ExperimentParams::default(),
            output: None,
            format: ReportFormat::Json,
        };
        assert!(cfg.validate().is_err());
        cfg.tester = ExperimentTester::Blr3;
        cfg.validate().unwrap();
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        assert!(ExperimentConfig::from_toml_str("tester = \"auto\"\ntrials = 1\nbogus = 2\n[instance]\nkind=\"linear\"\nn=4").is_err());
    }

    #[test]
    fn names_parse() {
        for t in ExperimentTester::ALL {
            assert_eq!(t.name().parse::<ExperimentTester>().unwrap(), t);
        }
        assert_eq!("real_additivity".parse::<ExperimentTester>().unwrap(), ExperimentTester::RealAdditivity);
        assert_eq!("pair-eraser".parse::<StrategyId>().unwrap(), StrategyId::PairEraser);
    }
}
