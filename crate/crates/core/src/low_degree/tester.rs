use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::low_degree::alpha::{finite_difference, g_q_lowdeg, scaled_gaussian, AlphaCoeffs};
use crate::low_degree::interpolate::lagrange_with_lebesgue;
use crate::real::additivity::{evaluate, Phase, RealCheck, RealTestOutcome, RealWitness};
use crate::real::distribution::{standard_gaussian, Distribution};
use crate::real::oracle::{RealFunction, RealOracle, Tolerance};
use crate::real::scalar::{norm, scale, Real, RealPoint};
use crate::seed::{trial_rng, Stream};
use crate::testers::Verdict;

/// Highest supported degree; beyond it the radial extrapolation amplifies
/// double-double roundoff past any useful tolerance.
pub const MAX_DEGREE: u32 = 8;

/// Nodes are pulled inward by this factor so the outermost one lies strictly
/// inside the open ball.
pub const NODE_INSET: f64 = 1.0 - 1e-9;

/// `r = (3d)^{-6}`.
pub fn ball_radius(d: u32) -> Real {
    Real::ONE / Real::new(f64::from(3 * d).powi(6))
}

/// Interpolation abscissae `c_i = i r / ((d+1) ‖p‖)`, `i = 1..=d+1`, inset.
pub fn radial_nodes(d: u32, p: &[Real]) -> Vec<Real> {
    let step = ball_radius(d) / (Real::new(f64::from(d + 1)) * norm(p)) * NODE_INSET;
    (1..=d + 1).map(|i| step * f64::from(i)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectorBranch {
    InBall,
    OutBall,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectedValue {
    pub value: Real,
    pub branch: CorrectorBranch,
    /// Allowance for comparing `value` against `f(p)`: the tolerance-scaled
    /// term magnitude inside the ball, the Lebesgue-amplified rounding bound
    /// of the node values outside it.
    pub error_bound: f64,
    pub lebesgue: f64,
}

/// Rounding bound, relative to the term magnitude, of one node value.
fn node_rounding(d: u32) -> f64 {
    let k = f64::from(d + 2);
    8.0 * k * k * Real::EPSILON
}

/// The corrector at `p` along a given direction `q`: `d + 1` queries inside
/// `B(0, r)`, `(d + 1)^2` outside it.
pub fn query_g_along(f: &mut RealOracle<'_>, d: u32, p: &[Real], q: &[Real]) -> Result<CorrectedValue> {
    let alpha = AlphaCoeffs::new(d);
    if norm(p) < ball_radius(d) {
        let (value, mag) = g_q_lowdeg(f, &alpha, p, q);
        return Ok(CorrectedValue {
            value,
            branch: CorrectorBranch::InBall,
            error_bound: f.tolerance().rel * mag.to_f64(),
            lebesgue: 1.0,
        });
    }
    let mut nodes = Vec::with_capacity(d as usize + 1);
    let mut max_mag = 0.0f64;
    for c in radial_nodes(d, p) {
        let (v, mag) = g_q_lowdeg(f, &alpha, &scale(p, c), q);
        max_mag = max_mag.max(mag.to_f64());
        nodes.push((c, v));
    }
    let interp = lagrange_with_lebesgue(&nodes, Real::ONE)?;
    Ok(CorrectedValue {
        value: interp.value,
        branch: CorrectorBranch::OutBall,
        error_bound: interp.lebesgue * node_rounding(d) * max_mag,
        lebesgue: interp.lebesgue,
    })
}

/// The corrector at `p` along one fresh Gaussian direction.
pub fn query_g_lowdeg<R: Rng + ?Sized>(f: &mut RealOracle<'_>, d: u32, p: &[Real], rng: &mut R) -> Result<CorrectedValue> {
    let q = standard_gaussian(p.len(), rng);
    query_g_along(f, d, p, &q)
}

/// Finite-difference tests run in one characterization round.
pub fn characterization_tests_per_round(d: u32) -> u64 {
    u64::from(d + 1) * (2 * u64::from(d + 2) + 1)
}

/// Queries in one full characterization round.
pub fn characterization_queries_per_round(d: u32) -> u64 {
    characterization_tests_per_round(d) * u64::from(d + 2)
}

/// Queries of one comparison iteration: `f(p)` plus the corrector.
pub fn comparison_queries(d: u32, branch: CorrectorBranch) -> u64 {
    let k = u64::from(d + 1);
    1 + match branch {
        CorrectorBranch::InBall => k,
        CorrectorBranch::OutBall => k * k,
    }
}

/// `n8` rounds of finite-difference tests along Gaussian lines at every scale
/// pattern `(j, t)`, `j = 1..=d+1`, `t = 0..=d+1`.
pub fn characterization_test<R: Rng + ?Sized>(
    f: &mut RealOracle<'_>,
    d: u32,
    n8: usize,
    rng: &mut R,
) -> (Verdict, usize, usize, Option<RealWitness>) {
    let n = f.arity();
    let tol = f.tolerance();
    let alpha = AlphaCoeffs::new(d);
    let check = RealCheck::FiniteDifference { d };
    let run = |f: &mut RealOracle<'_>, p: RealPoint, q: RealPoint| {
        let (sum, slack) = finite_difference(f, &alpha, &p, &q);
        (tol.excess(sum, Real::ZERO, slack) > 0.0).then(|| RealWitness {
            check,
            inputs: vec![p, q],
            lhs: sum,
            rhs: Real::ZERO,
        })
    };
    let mut checks = 0;
    for round in 1..=n8 {
        for j in 1..=d + 1 {
            let j = f64::from(j);
            for t in 0..=d + 1 {
                let spread = (f64::from(t * t) + 1.0).sqrt();
                let p = scaled_gaussian(n, j * spread, rng);
                let q = scaled_gaussian(n, 1.0, rng);
                checks += 1;
                if let Some(w) = run(f, p, q) {
                    return (Verdict::Reject, round, checks, Some(w));
                }
                let p = scaled_gaussian(n, j, rng);
                let q = scaled_gaussian(n, spread, rng);
                checks += 1;
                if let Some(w) = run(f, p, q) {
                    return (Verdict::Reject, round, checks, Some(w));
                }
            }
            let p = scaled_gaussian(n, j, rng);
            let q = scaled_gaussian(n, j, rng);
            checks += 1;
            if let Some(w) = run(f, p, q) {
                return (Verdict::Reject, round, checks, Some(w));
            }
        }
    }
    (Verdict::Accept, n8, checks, None)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[derive(Default)]
pub struct LowDegreeConfig {
    /// Characterization rounds; `⌈8d²⌉` when unset.
    pub n8: Option<usize>,
    /// Comparison iterations; `⌈4/ε⌉` when unset.
    pub n7: Option<usize>,
    pub tol: Tolerance,
}


impl LowDegreeConfig {
    pub fn characterization_rounds(&self, d: u32) -> usize {
        self.n8.unwrap_or(8 * (d as usize).pow(2))
    }

    pub fn comparison_count(&self, eps: f64) -> usize {
        self.n7.unwrap_or_else(|| (4.0 / eps - 1e-9).ceil() as usize)
    }

    /// Exact query count of a run whose characterization phase passed and
    /// which executed `iterations` comparisons, `in_ball` of them inside `B(0, r)`.
    pub fn passing_query_count(&self, d: u32, iterations: usize, in_ball: usize) -> u64 {
        self.characterization_rounds(d) as u64 * characterization_queries_per_round(d)
            + in_ball as u64 * comparison_queries(d, CorrectorBranch::InBall)
            + (iterations - in_ball) as u64 * comparison_queries(d, CorrectorBranch::OutBall)
    }
}

/// The distribution-free degree-`d` tester.
pub fn low_degree_tester<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    f: &mut RealOracle<'_>,
    d: u32,
    dist: &Distribution,
    eps: f64,
    config: &LowDegreeConfig,
    char_rng: &mut R1,
    cmp_rng: &mut R2,
) -> Result<RealTestOutcome> {
    if !(1..=MAX_DEGREE).contains(&d) {
        return Err(Error::InvalidParameter(format!("degree must lie in 1..={MAX_DEGREE}, got {d}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0,1), got {eps}")));
    }
    let n8 = config.characterization_rounds(d);
    if n8 == 0 {
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
    let (verdict, rounds, checks, witness) = characterization_test(f, d, n8, char_rng);
    let mut outcome = RealTestOutcome {
        verdict,
        phase: Phase::Characterization,
        queries_used: 0,
        characterization_rounds: rounds,
        characterization_checks: checks,
        comparison_iterations: 0,
        in_ball_comparisons: 0,
        witness,
    };
    if verdict == Verdict::Accept {
        outcome.phase = Phase::Comparison;
        let tol = f.tolerance();
        for _ in 0..config.comparison_count(eps) {
            let p = dist.sample(cmp_rng);
            let q = standard_gaussian(p.len(), cmp_rng);
            outcome.comparison_iterations += 1;
            if norm(&p) < ball_radius(d) {
                outcome.in_ball_comparisons += 1;
            }
            let inputs = vec![p, q];
            let check = RealCheck::Extrapolation { d };
            let (lhs, rhs, slack) = evaluate(f, check, &inputs);
            if tol.excess(lhs, rhs, slack) > 0.0 {
                outcome.verdict = Verdict::Reject;
                outcome.witness = Some(RealWitness { check, inputs, lhs, rhs });
                break;
            }
        }
    }
    outcome.queries_used = f.queries() - start;
    Ok(outcome)
}

/// One seeded trial on a fresh oracle, with disjoint streams for the two phases.
pub fn low_degree_trial(
    f: &dyn RealFunction,
    d: u32,
    dist: &Distribution,
    eps: f64,
    config: &LowDegreeConfig,
    seed: u64,
    trial: u64,
) -> Result<RealTestOutcome> {
    let mut oracle = RealOracle::new(f, config.tol);
    let mut char_rng = trial_rng(seed, trial, Stream::Characterization);
    let mut cmp_rng = trial_rng(seed, trial, Stream::Comparison);
    low_degree_tester(&mut oracle, d, dist, eps, config, &mut char_rng, &mut cmp_rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::scalar::to_point;
    use crate::real::zoo::ZooFunction;

    #[test]
    fn degree_one_nodes() {
        let p = to_point(&[0.6, 0.8]);
        let c = radial_nodes(1, &p);
        assert!((ball_radius(1).to_f64() - 1.0 / 729.0).abs() < 1e-20);
        // Equal to r/2 and r up to the inset.
        assert!((c[0].to_f64() * 1458.0 - 1.0).abs() < 2e-9);
        assert!((c[1].to_f64() * 729.0 - 1.0).abs() < 2e-9);
        assert!(c[1].to_f64() < 1.0 / 729.0);
        assert!(norm(&scale(&p, c[1])) < ball_radius(1));
    }

    #[test]
    fn in_and_out_ball_agree_on_polynomials() {
        let mut rng = trial_rng(21, 0, Stream::Comparison);
        for d in 1..=3 {
            let f = ZooFunction::random_poly(3, d, &mut rng);
            let mut o = RealOracle::new(&f, Tolerance::default());
            let r = ball_radius(d).to_f64();
            for (radius, branch) in [(0.5 * r, CorrectorBranch::InBall), (1.01 * r, CorrectorBranch::OutBall), (3.0, CorrectorBranch::OutBall)] {
                let dir = standard_gaussian(3, &mut rng);
                let p = scale(&dir, Real::new(radius) / norm(&dir));
                let before = o.queries();
                let g = query_g_lowdeg(&mut o, d, &p, &mut rng).unwrap();
                assert_eq!(g.branch, branch);
                assert_eq!(o.queries() - before, comparison_queries(d, branch) - 1);
                let direct = f.eval(&p).to_f64();
                let err = (g.value.to_f64() - direct).abs();
                assert!(err <= 1e-6 * direct.abs().max(1e-12), "d={d} radius={radius}: {err}");
                assert!(err <= g.error_bound + 1e-9 * direct.abs(), "bound {} < {err}", g.error_bound);
            }
        }
    }

    #[test]
    fn origin_takes_the_in_ball_branch() {
        let f: ZooFunction = "poly(2; 3:0,0; 1:1,1)".parse().unwrap();
        let mut o = RealOracle::new(&f, Tolerance::default());
        let g = query_g_along(&mut o, 2, &to_point(&[0.0, 0.0]), &to_point(&[0.3, -0.4])).unwrap();
        assert_eq!(g.branch, CorrectorBranch::InBall);
        assert!((g.value.to_f64() - 3.0).abs() < 1e-20);
    }

    #[test]
    fn query_count_formulas() {
        assert_eq!(characterization_queries_per_round(2), 3 * 9 * 4);
        let cfg = LowDegreeConfig::default();
        assert_eq!(cfg.characterization_rounds(3), 72);
        assert_eq!(cfg.comparison_count(0.1), 40);
        let mut rng = trial_rng(2, 0, Stream::Characterization);
        for d in 1..=3 {
            let f = ZooFunction::random_poly(2, d, &mut rng);
            let cfg = LowDegreeConfig {
                n8: Some(2),
                ..LowDegreeConfig::default()
            };
            let dist = Distribution::gaussian_with_atom(0.3, vec![0.0, 0.0]);
            let out = low_degree_trial(&f, d, &dist, 0.2, &cfg, 5, u64::from(d)).unwrap();
            assert!(out.accepted(), "{:?}", out.witness);
            assert_eq!(out.comparison_iterations, 20);
            assert!(out.in_ball_comparisons > 0);
            assert_eq!(out.queries_used, cfg.passing_query_count(d, 20, out.in_ball_comparisons));
        }
    }

    #[test]
    fn exponential_fails_characterization() {
        let f = ZooFunction::Exp { n: 2 };
        let alpha = AlphaCoeffs::new(1);
        let mut o = RealOracle::new(&f, Tolerance::default());
        let mut rng = trial_rng(8, 0, Stream::Characterization);
        let trials = 2000;
        let violations = (0..trials)
            .filter(|_| {
                let p = scaled_gaussian(2, 1.0, &mut rng);
                let q = scaled_gaussian(2, 1.0, &mut rng);
                let (sum, slack) = finite_difference(&mut o, &alpha, &p, &q);
                Tolerance::default().excess(sum, Real::ZERO, slack) > 0.0
            })
            .count();
        assert!(violations as f64 >= 0.99 * trials as f64, "{violations}");
        let out = low_degree_trial(&f, 1, &Distribution::gaussian(2), 0.1, &LowDegreeConfig::default(), 0, 0).unwrap();
        assert_eq!(out.phase, Phase::Characterization);
        assert!(out.witness.unwrap().revalidates(&f, Tolerance::default()));
    }

    #[test]
    fn bump_is_rejected_with_a_valid_witness() {
        let mut rng = trial_rng(4, 0, Stream::Session);
        let eps = 0.1;
        let f = ZooFunction::bump(ZooFunction::random_poly(2, 2, &mut rng), 5.0, 5.0);
        let dist = Distribution::gaussian_with_atom(2.0 * eps, vec![6.0, 0.0]);
        let cfg = LowDegreeConfig::default();
        let mut rejects = 0;
        for trial in 0..60 {
            let out = low_degree_trial(&f, 2, &dist, eps, &cfg, 1, trial).unwrap();
            if let Some(w) = &out.witness {
                rejects += 1;
                assert!(w.revalidates(&f, cfg.tol));
            }
        }
        assert!(rejects >= 50, "{rejects}");
    }

    #[test]
    fn degree_one_agrees_with_additivity_on_additive_inputs() {
        use crate::real::additivity::{additivity_trial, AdditivityConfig};
        let f: ZooFunction = "additive(2,-1,0.5)".parse().unwrap();
        let dist = Distribution::gaussian(3);
        for trial in 0..20 {
            let a = additivity_trial(&f, &dist, 0.1, &AdditivityConfig::default(), 6, trial).unwrap();
            let b = low_degree_trial(&f, 1, &dist, 0.1, &LowDegreeConfig::default(), 6, trial).unwrap();
            assert_eq!(a.verdict, b.verdict);
        }
    }
}
