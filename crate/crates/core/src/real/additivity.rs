use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::low_degree::{finite_difference, query_g_along, AlphaCoeffs};
use crate::real::correction::g_direction_scaled;
use crate::real::distribution::{standard_gaussian, Distribution};
use crate::real::oracle::{RealFunction, RealOracle, Tolerance};
use crate::real::scalar::{axpy, scale, Real, RealPoint};
use crate::seed::{trial_rng, Stream};
use crate::testers::Verdict;

pub const DEFAULT_CHARACTERIZATION_ROUNDS: usize = 20;

/// Distinct queries in one full characterization round:
/// `f(x)`, `f(-x)`, `f(y)`, `f(x-y)` and the three rotated differences.
pub const QUERIES_PER_CHARACTERIZATION_ROUND: u64 = 7;

/// Queries per comparison iteration: `f(p)`, `f(p/κ - x)`, `f(x)`.
pub const QUERIES_PER_COMPARISON: u64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Characterization,
    Comparison,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealCheck {
    /// `f(-x) = -f(x)`
    Negation,
    /// `f(x - y) = f(x) - f(y)`
    Difference,
    /// `f((x-y)/√2) = f((x-z)/√2) + f((z-y)/√2)`
    Rotation,
    /// `f(p) = κ_p (f(p/κ_p - x) + f(x))`
    Comparison,
    /// `Σ_{i=0}^{d+1} α_i f(p + i q) = 0`
    FiniteDifference { d: u32 },
    /// `f(p)` against the degree-`d` corrector along direction `q`.
    Extrapolation { d: u32 },
}

/// The sampled points behind a rejection. `inputs` are `[x]`, `[x, y]`,
/// `[x, y, z]`, `[p, x]` or `[p, q]` depending on the check.
#[derive(Clone, Debug, PartialEq)]
pub struct RealWitness {
    pub check: RealCheck,
    pub inputs: Vec<RealPoint>,
    pub lhs: Real,
    pub rhs: Real,
}

impl RealWitness {
    /// Re-evaluates the check from the stored inputs; returns the amount by
    /// which it exceeds the tolerance (positive for a genuine violation).
    pub fn excess(&self, f: &dyn RealFunction, tol: Tolerance) -> f64 {
        let mut o = RealOracle::new(f, tol);
        let (lhs, rhs, slack) = evaluate(&mut o, self.check, &self.inputs);
        tol.excess(lhs, rhs, slack)
    }

    pub fn revalidates(&self, f: &dyn RealFunction, tol: Tolerance) -> bool {
        self.excess(f, tol) > 0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealTestOutcome {
    pub verdict: Verdict,
    /// Phase that produced the verdict; `Comparison` for every accept.
    pub phase: Phase,
    pub queries_used: u64,
    pub characterization_rounds: usize,
    /// Characterization checks evaluated, including a rejecting one.
    pub characterization_checks: usize,
    pub comparison_iterations: usize,
    /// Comparisons whose point fell inside the corrector's small ball
    /// (low-degree tester only; those cost fewer queries).
    pub in_ball_comparisons: usize,
    pub witness: Option<RealWitness>,
}

impl RealTestOutcome {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdditivityConfig {
    pub n6: usize,
    pub tol: Tolerance,
    /// Overrides `⌈4/ε⌉` comparison iterations.
    pub n5: Option<usize>,
}

impl Default for AdditivityConfig {
    fn default() -> Self {
        Self {
            n6: DEFAULT_CHARACTERIZATION_ROUNDS,
            tol: Tolerance::default(),
            n5: None,
        }
    }
}

impl AdditivityConfig {
    pub fn comparison_count(&self, eps: f64) -> usize {
        self.n5.unwrap_or_else(|| (4.0 / eps - 1e-9).ceil() as usize)
    }

    /// Exact query count of a run whose characterization phase passed.
    pub fn accepting_query_count(&self, comparison_iterations: usize) -> u64 {
        QUERIES_PER_CHARACTERIZATION_ROUND * self.n6 as u64 + QUERIES_PER_COMPARISON * comparison_iterations as u64
    }
}

/// Evaluates one check, returning `(lhs, rhs, rounding allowance)`.
pub(crate) fn evaluate(f: &mut RealOracle<'_>, check: RealCheck, inputs: &[RealPoint]) -> (Real, Real, Real) {
    let inv_sqrt2 = Real::ONE / Real::new(2.0).sqrt();
    let rel = Real::new(f.tolerance().rel);
    match check {
        RealCheck::Negation => {
            let x = &inputs[0];
            let fx = f.query(x);
            let fnx = f.query(&scale(x, -Real::ONE));
            (fnx, -fx, rel * fx.abs())
        }
        RealCheck::Difference => {
            let (x, y) = (&inputs[0], &inputs[1]);
            let fx = f.query(x);
            let fy = f.query(y);
            let fxy = f.query(&axpy(x, -Real::ONE, y));
            (fxy, fx - fy, rel * (fx.abs() + fy.abs()))
        }
        RealCheck::Rotation => {
            let (x, y, z) = (&inputs[0], &inputs[1], &inputs[2]);
            let diff = |a: &[Real], b: &[Real]| scale(&axpy(a, -Real::ONE, b), inv_sqrt2);
            let a = f.query(&diff(x, y));
            let b = f.query(&diff(x, z));
            let c = f.query(&diff(z, y));
            (a, b + c, rel * (b.abs() + c.abs()))
        }
        RealCheck::Comparison => {
            let (p, x) = (&inputs[0], &inputs[1]);
            let fp = f.query(p);
            let (g, s) = g_direction_scaled(f, p, x);
            (fp, g, Real::new(f.tolerance().rel) * s)
        }
        RealCheck::FiniteDifference { d } => {
            let (sum, slack) = finite_difference(f, &AlphaCoeffs::new(d), &inputs[0], &inputs[1]);
            (sum, Real::ZERO, slack)
        }
        RealCheck::Extrapolation { d } => {
            let fp = f.query(&inputs[0]);
            let g = query_g_along(f, d, &inputs[0], &inputs[1]).expect("nodes are distinct by construction");
            (fp, g.value, Real::new(g.error_bound))
        }
    }
}

fn violated(tol: Tolerance, lhs: Real, rhs: Real, operands: Real) -> bool {
    tol.excess(lhs, rhs, Real::new(tol.rel) * operands) > 0.0
}

/// The characterization subroutine: `n6` rounds of the negation, difference
/// and rotation checks on fresh Gaussian `x, y, z`. Values shared between
/// checks of one round are queried once.
pub fn test_additivity<R: Rng + ?Sized>(
    f: &mut RealOracle<'_>,
    n6: usize,
    rng: &mut R,
) -> (Verdict, usize, Option<RealWitness>) {
    let n = f.arity();
    let tol = f.tolerance();
    let inv_sqrt2 = Real::ONE / Real::new(2.0).sqrt();
    for round in 1..=n6 {
        let x = standard_gaussian(n, rng);
        let y = standard_gaussian(n, rng);
        let z = standard_gaussian(n, rng);
        let reject = |check, inputs: Vec<RealPoint>, lhs, rhs| {
            (
                Verdict::Reject,
                round,
                Some(RealWitness {
                    check,
                    inputs,
                    lhs,
                    rhs,
                }),
            )
        };

        let fx = f.query(&x);
        let fnx = f.query(&scale(&x, -Real::ONE));
        if violated(tol, fnx, -fx, fx.abs()) {
            return reject(RealCheck::Negation, vec![x], fnx, -fx);
        }

        let fy = f.query(&y);
        let fxy = f.query(&axpy(&x, -Real::ONE, &y));
        if violated(tol, fxy, fx - fy, fx.abs() + fy.abs()) {
            return reject(RealCheck::Difference, vec![x, y], fxy, fx - fy);
        }

        let diff = |a: &[Real], b: &[Real]| scale(&axpy(a, -Real::ONE, b), inv_sqrt2);
        let a = f.query(&diff(&x, &y));
        let b = f.query(&diff(&x, &z));
        let c = f.query(&diff(&z, &y));
        if violated(tol, a, b + c, b.abs() + c.abs()) {
            return reject(RealCheck::Rotation, vec![x, y, z], a, b + c);
        }
    }
    (Verdict::Accept, n6, None)
}

/// The distribution-free additivity tester. The characterization phase draws
/// from `char_rng`, the comparison phase from `cmp_rng`.
pub fn additivity_tester<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    f: &mut RealOracle<'_>,
    dist: &Distribution,
    eps: f64,
    config: &AdditivityConfig,
    char_rng: &mut R1,
    cmp_rng: &mut R2,
) -> Result<RealTestOutcome> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0,1), got {eps}")));
    }
    if config.n6 == 0 {
        return Err(Error::InvalidParameter("at least one characterization round is required".into()));
    }
    dist.validate()?;
    if dist.dim() != f.arity() {
        return Err(Error::DimensionMismatch {
            expected: f.arity() as u32,
            found: dist.dim() as u32,
        });
    }
    let start = f.queries();
    let (verdict, rounds, witness) = test_additivity(f, config.n6, char_rng);
    let checks = 3 * (rounds - 1)
        + match witness.as_ref().map(|w| w.check) {
            Some(RealCheck::Negation) => 1,
            Some(RealCheck::Difference) => 2,
            _ => 3,
        };
    if verdict == Verdict::Reject {
        return Ok(RealTestOutcome {
            verdict,
            phase: Phase::Characterization,
            queries_used: f.queries() - start,
            characterization_rounds: rounds,
            characterization_checks: checks,
            comparison_iterations: 0,
            in_ball_comparisons: 0,
            witness,
        });
    }

    let tol = f.tolerance();
    let n5 = config.comparison_count(eps);
    for it in 1..=n5 {
        let p = dist.sample(cmp_rng);
        let x = standard_gaussian(p.len(), cmp_rng);
        let inputs = vec![p, x];
        let (lhs, rhs, slack) = evaluate(f, RealCheck::Comparison, &inputs);
        if tol.excess(lhs, rhs, slack) > 0.0 {
            return Ok(RealTestOutcome {
                verdict: Verdict::Reject,
                phase: Phase::Comparison,
                queries_used: f.queries() - start,
                characterization_rounds: rounds,
                characterization_checks: checks,
                comparison_iterations: it,
                in_ball_comparisons: 0,
                witness: Some(RealWitness {
                    check: RealCheck::Comparison,
                    inputs,
                    lhs,
                    rhs,
                }),
            });
        }
    }
    Ok(RealTestOutcome {
        verdict: Verdict::Accept,
        phase: Phase::Comparison,
        queries_used: f.queries() - start,
        characterization_rounds: rounds,
        characterization_checks: checks,
        comparison_iterations: n5,
        in_ball_comparisons: 0,
        witness: None,
    })
}

/// One seeded trial on a fresh oracle, with disjoint streams for the two phases.
pub fn additivity_trial(
    f: &dyn RealFunction,
    dist: &Distribution,
    eps: f64,
    config: &AdditivityConfig,
    seed: u64,
    trial: u64,
) -> Result<RealTestOutcome> {
    let mut oracle = RealOracle::new(f, config.tol);
    let mut char_rng = trial_rng(seed, trial, Stream::Characterization);
    let mut cmp_rng = trial_rng(seed, trial, Stream::Comparison);
    additivity_tester(&mut oracle, dist, eps, config, &mut char_rng, &mut cmp_rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::zoo::ZooFunction;

    fn zoo(s: &str) -> ZooFunction {
        s.parse().unwrap()
    }

    #[test]
    fn additive_functions_always_accept_with_exact_query_count() {
        let cfg = AdditivityConfig::default();
        for s in ["additive(1,2,3)", "additive(-0.3,1e3)", "poly(2; 2:1,0; -1:0,1)"] {
            let f = zoo(s);
            let dist = Distribution::gaussian_with_atom(0.3, vec![40.0; f.arity()]);
            for trial in 0..50 {
                let out = additivity_trial(&f, &dist, 0.1, &cfg, 3, trial).unwrap();
                assert!(out.accepted(), "{s} trial {trial}: {:?}", out.witness);
                assert_eq!(out.comparison_iterations, 40);
                assert_eq!(out.queries_used, cfg.accepting_query_count(40));
                assert_eq!(out.queries_used, 7 * 20 + 3 * 40);
            }
        }
    }

    #[test]
    fn affine_offset_rejects_in_round_one() {
        let f = zoo("affine(1,1,1)");
        let out = additivity_trial(&f, &Distribution::gaussian(2), 0.1, &AdditivityConfig::default(), 0, 0).unwrap();
        // The negation check sees f(-x) + f(x) = 2 and fires first.
        assert_eq!(out.verdict, Verdict::Reject);
        assert_eq!(out.phase, Phase::Characterization);
        assert_eq!(out.characterization_rounds, 1);
        let w = out.witness.unwrap();
        assert_eq!(w.check, RealCheck::Negation);
        assert!(((w.lhs - w.rhs).to_f64() - 2.0).abs() < 1e-12);
        assert!(w.revalidates(&f, Tolerance::default()));
    }

    #[test]
    fn affine_offset_difference_residual_is_plus_one() {
        // f(x - y) - (f(x) - f(y)) for f = Σv + 1: the offset survives once.
        let f = zoo("affine(1,1,1)");
        let mut o = RealOracle::new(&f, Tolerance::default());
        let inputs = vec![crate::real::scalar::to_point(&[0.3, -1.2]), crate::real::scalar::to_point(&[2.0, 0.5])];
        let (lhs, rhs, _) = evaluate(&mut o, RealCheck::Difference, &inputs);
        assert!(((lhs - rhs).to_f64() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn even_square_is_rejected_by_negation() {
        let f = zoo("poly(3; 1:2)");
        for trial in 0..200 {
            let out = additivity_trial(&f, &Distribution::gaussian(3), 0.2, &AdditivityConfig::default(), 1, trial).unwrap();
            let w = out.witness.expect("must reject");
            assert_eq!(w.check, RealCheck::Negation);
            assert_eq!(out.queries_used, 2);
        }
    }

    #[test]
    fn far_bump_is_caught_in_the_comparison_phase() {
        let eps = 0.1;
        let f = ZooFunction::bump(zoo("additive(1,-1)"), 5.0, 5.0);
        let dist = Distribution::gaussian_with_atom(2.0 * eps, vec![6.0, 0.0]);
        let cfg = AdditivityConfig::default();
        let trials = 300;
        let mut rejects = 0;
        for trial in 0..trials {
            let out = additivity_trial(&f, &dist, eps, &cfg, 11, trial).unwrap();
            if let Some(w) = &out.witness {
                rejects += 1;
                assert!(w.revalidates(&f, cfg.tol));
                if out.phase == Phase::Comparison {
                    assert_eq!(out.queries_used, cfg.accepting_query_count(out.comparison_iterations));
                }
            }
        }
        assert!(rejects as f64 >= 0.9 * trials as f64, "{rejects}/{trials}");
    }

    #[test]
    fn rejects_bad_parameters() {
        let f = zoo("additive(1)");
        let cfg = AdditivityConfig::default();
        assert!(additivity_trial(&f, &Distribution::gaussian(1), 0.0, &cfg, 0, 0).is_err());
        assert!(additivity_trial(&f, &Distribution::gaussian(2), 0.1, &cfg, 0, 0).is_err());
    }
}
