use serde::{Deserialize, Serialize};

/// `Φ^{-1}(0.975)`.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Successes out of a number of Bernoulli trials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
}

impl Proportion {
    pub fn new(successes: u64, trials: u64) -> Self {
        assert!(successes <= trials, "{successes} successes out of {trials}");
        Self { successes, trials }
    }

    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    /// Binomial standard error at the empirical rate.
    pub fn sigma(&self) -> f64 {
        if self.trials == 0 {
            return 0.5;
        }
        let p = self.rate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn complement(&self) -> Self {
        Self::new(self.trials - self.successes, self.trials)
    }

    /// Wilson score interval with critical value `z`.
    pub fn wilson(&self, z: f64) -> Interval {
        if self.trials == 0 {
            return Interval { lo: 0.0, hi: 1.0 };
        }
        let n = self.trials as f64;
        let p = self.rate();
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        // Clamp so the interval always contains the point estimate despite rounding.
        Interval {
            lo: (center - half).max(0.0).min(p),
            hi: (center + half).min(1.0).max(p),
        }
    }

    pub fn wilson95(&self) -> Interval {
        self.wilson(Z95)
    }
}

/// Newcombe's hybrid score interval for `p_a - p_b`.
pub fn newcombe_difference(a: Proportion, b: Proportion, z: f64) -> Interval {
    let (pa, pb) = (a.rate(), b.rate());
    let (ia, ib) = (a.wilson(z), b.wilson(z));
    let d = pa - pb;
    Interval {
        lo: d - ((pa - ia.lo).powi(2) + (ib.hi - pb).powi(2)).sqrt(),
        hi: d + ((ia.hi - pa).powi(2) + (pb - ib.lo).powi(2)).sqrt(),
    }
}

/// Interval for `|p_a - p_b|` induced by the Newcombe interval of the difference.
pub fn abs_gap_interval(a: Proportion, b: Proportion, z: f64) -> Interval {
    let i = newcombe_difference(a, b, z);
    let hi = i.lo.abs().max(i.hi.abs());
    let lo = if i.lo <= 0.0 && i.hi >= 0.0 { 0.0 } else { i.lo.abs().min(i.hi.abs()) };
    Interval { lo, hi }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtLeast,
    AtMost,
    Equals,
}

/// How an empirical estimate is compared with a bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    /// No slack: the point estimate itself must satisfy the relation.
    Exact,
    /// The relation must hold for some rate inside the Wilson interval at `z`.
    Wilson { z: f64 },
    /// The relation must hold for the whole Wilson interval at `z`.
    WilsonStrict { z: f64 },
}

/// One named inequality evaluated against an empirical estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub relation: Relation,
    pub bound: f64,
    pub empirical: f64,
    pub ci: Interval,
    pub rule: Rule,
    pub passed: bool,
}

impl BoundCheck {
    /// Checks a proportion against a bound.
    pub fn proportion(name: impl Into<String>, relation: Relation, bound: f64, p: Proportion, rule: Rule) -> Self {
        let ci = match rule {
            Rule::Exact => Interval {
                lo: p.rate(),
                hi: p.rate(),
            },
            Rule::Wilson { z } | Rule::WilsonStrict { z } => p.wilson(z),
        };
        Self::interval(name, relation, bound, p.rate(), ci, rule)
    }

    /// Checks a quantity with a precomputed interval; `Wilson` means "some
    /// value of the interval satisfies the relation", `WilsonStrict` "all do".
    pub fn interval(name: impl Into<String>, relation: Relation, bound: f64, empirical: f64, ci: Interval, rule: Rule) -> Self {
        let passed = match rule {
            Rule::Exact => holds(relation, empirical, empirical, bound),
            Rule::Wilson { .. } => optimistic(relation, ci, bound),
            Rule::WilsonStrict { .. } => strict(relation, ci, bound),
        };
        Self {
            name: name.into(),
            relation,
            bound,
            empirical,
            ci,
            rule,
            passed,
        }
    }

    /// An exact equality or inequality between two counts.
    pub fn exact(name: impl Into<String>, relation: Relation, bound: f64, empirical: f64) -> Self {
        Self::interval(
            name,
            relation,
            bound,
            empirical,
            Interval {
                lo: empirical,
                hi: empirical,
            },
            Rule::Exact,
        )
    }

    pub fn line(&self) -> String {
        let rel = match self.relation {
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
            Relation::Equals => "==",
        };
        format!(
            "{} {}: {} {rel} {} (CI [{:.6}, {:.6}])",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.empirical,
            self.bound,
            self.ci.lo,
            self.ci.hi
        )
    }
}

fn holds(relation: Relation, lo: f64, hi: f64, bound: f64) -> bool {
    match relation {
        Relation::AtLeast => lo >= bound,
        Relation::AtMost => hi <= bound,
        Relation::Equals => lo == bound && hi == bound,
    }
}

fn optimistic(relation: Relation, ci: Interval, bound: f64) -> bool {
    match relation {
        Relation::AtLeast => ci.hi >= bound,
        Relation::AtMost => ci.lo <= bound,
        Relation::Equals => ci.contains(bound),
    }
}

fn strict(relation: Relation, ci: Interval, bound: f64) -> bool {
    holds(relation, ci.lo, ci.hi, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use statrs::distribution::{ContinuousCDF, Normal};

    #[test]
    fn critical_value_matches_normal_quantile() {
        let z = Normal::standard().inverse_cdf(0.975);
        assert!((z - Z95).abs() < 1e-12);
    }

    #[test]
    fn wilson_known_values() {
        // 8/10 at z = 1.96: [0.4902, 0.9433] from the closed form.
        let i = Proportion::new(8, 10).wilson95();
        assert!((i.lo - 0.490_16).abs() < 1e-4 && (i.hi - 0.943_32).abs() < 1e-4, "{i:?}");
        let all = Proportion::new(100, 100).wilson95();
        assert_eq!(all.hi, 1.0);
        assert!(all.lo > 0.96 && all.contains(1.0));
        assert_eq!(Proportion::new(0, 0).wilson95(), Interval { lo: 0.0, hi: 1.0 });
    }

    #[test]
    fn wilson_coverage_is_close_to_nominal() {
        let mut rng = crate::seed::trial_rng(99, 0, crate::seed::Stream::Session);
        for &p in &[0.05, 0.3, 0.5] {
            let reps = 10_000;
            let n = 200;
            let covered = (0..reps)
                .filter(|_| {
                    let s = (0..n).filter(|_| rng.random::<f64>() < p).count() as u64;
                    Proportion::new(s, n).wilson95().contains(p)
                })
                .count();
            let rate = covered as f64 / reps as f64;
            assert!((0.93..=0.97).contains(&rate), "p = {p}: coverage {rate}");
        }
    }

    #[test]
    fn bound_check_directions() {
        let p = Proportion::new(60, 100);
        assert!(BoundCheck::proportion("x", Relation::AtLeast, 2.0 / 3.0, p, Rule::Wilson { z: 2.0 }).passed);
        assert!(!BoundCheck::proportion("x", Relation::AtLeast, 2.0 / 3.0, p, Rule::WilsonStrict { z: 2.0 }).passed);
        assert!(!BoundCheck::proportion("x", Relation::AtLeast, 0.9, p, Rule::Wilson { z: 2.0 }).passed);
        assert!(BoundCheck::proportion("x", Relation::AtMost, 0.55, p, Rule::Wilson { z: 2.0 }).passed);
        assert!(!BoundCheck::proportion("x", Relation::Equals, 1.0, p, Rule::Exact).passed);
        assert!(BoundCheck::proportion("x", Relation::Equals, 1.0, Proportion::new(5, 5), Rule::Exact).passed);
    }

    #[test]
    fn newcombe_brackets_the_difference() {
        let a = Proportion::new(900, 1000);
        let b = Proportion::new(100, 1000);
        let i = newcombe_difference(a, b, Z95);
        assert!(i.contains(0.8) && i.lo > 0.75 && i.hi < 0.85, "{i:?}");
        let g = abs_gap_interval(b, a, Z95);
        assert!(g.contains(0.8));
        let same = abs_gap_interval(a, a, Z95);
        assert_eq!(same.lo, 0.0);
    }
}
