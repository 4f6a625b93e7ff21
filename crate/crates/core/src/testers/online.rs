use rand::seq::index::sample;

use crate::error::{Error, Result};
use crate::f2::PointF2;
use crate::oracle::{OracleAnswer, OracleSession};
use crate::testers::outcome::{Branch, TestOutcome, Verdict, Witness};
use crate::testers::params::{Case, TesterParams};

/// Result of one batch-XOR iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationResult {
    /// Some answer among the `m + 1` queried points was erased.
    pub erasure_seen: bool,
    pub witness: Option<Witness>,
}

/// One iteration: query `m` fresh uniform points, only then pick a uniform
/// size-`m/2` subset `S`, and query `y = ⊕_{j∈S} x_j`.
///
/// A violation needs every value in `S ∪ {y}` to be present; an erased value
/// can never certify a `-1` product.
pub fn online_iteration(session: &mut OracleSession<'_>, m: usize) -> Result<IterationResult> {
    let mut xs = Vec::with_capacity(m);
    let mut answers = Vec::with_capacity(m);
    for _ in 0..m {
        let (x, a) = session.sample_uniform()?;
        xs.push(x);
        answers.push(a);
    }
    let mut subset: Vec<usize> = sample(session.rng(), m, m / 2).into_vec();
    subset.sort_unstable();
    let mut y = PointF2::zero(session.dim())?;
    for &j in &subset {
        y.xor_assign(&xs[j])?;
    }
    let ay = session.query(&y)?;
    let erasure_seen = ay.is_erased() || answers.iter().any(|a| a.is_erased());

    let used: Vec<OracleAnswer> = subset.iter().map(|&j| answers[j]).chain([ay]).collect();
    let bits: Option<Vec<bool>> = used.iter().map(|a| a.value()).collect();
    let witness = bits.and_then(|bits| {
        bits.iter().fold(false, |acc, &b| acc ^ b).then(|| Witness::XorProduct {
            points: subset.iter().map(|&j| xs[j].clone()).chain([y]).collect(),
            answers: bits,
        })
    });
    Ok(IterationResult { erasure_seen, witness })
}

/// The online-erasure-resilient linearity tester for `m <= n/3`.
///
/// Always runs every iteration, so the query count is exactly
/// `iterations * (m + 1)`; rejects iff some iteration found a violation.
pub fn online_linearity_tester(session: &mut OracleSession<'_>, params: &TesterParams) -> Result<TestOutcome> {
    params.validate()?;
    if params.n != session.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            found: session.dim(),
        });
    }
    let m = params.batch_size();
    if params.case() == Case::Two && !params.force_case_one {
        return Err(Error::OutsideCaseOne { m, n: params.n });
    }
    let start_calls = session.calls();
    let start_erased = session.erased_answers();
    let mut witness = None;
    let mut erased_iterations = 0;
    for _ in 0..params.online_iterations {
        let it = online_iteration(session, m as usize)?;
        erased_iterations += it.erasure_seen as u64;
        if witness.is_none() {
            witness = it.witness;
        }
    }
    Ok(TestOutcome {
        verdict: if witness.is_some() { Verdict::Reject } else { Verdict::Accept },
        branch: Branch::Online,
        queries_used: session.calls() - start_calls,
        erasures_seen: session.erased_answers() - start_erased,
        erased_iterations,
        iterations: params.online_iterations as u64,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2::{make_junta_far, LinearFn};
    use crate::oracle::{
        adversary_null, adversary_pair_eraser, adversary_subset_eraser, open_session, AdversaryConfig,
        ManipulationKind, RateMode,
    };
    use rand::SeedableRng;

    #[test]
    fn refuses_case_two_unless_forced() {
        let f = LinearFn::zero(24).unwrap();
        let mut s = open_session(&f, AdversaryConfig::none(), adversary_null(), 0);
        let mut p = TesterParams::new(24, 0.5, 2.0);
        assert!(matches!(online_linearity_tester(&mut s, &p), Err(Error::OutsideCaseOne { m: 84, n: 24 })));
        p.force_case_one = true;
        let out = online_linearity_tester(&mut s, &p).unwrap();
        assert!(out.accepted());
        assert_eq!(out.queries_used, 6 * 85);
    }

    #[test]
    fn linear_accepts_against_erasers_in_case_one() {
        let n = 288;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let f = LinearFn::new(PointF2::random(n, &mut rng));
        let p = TesterParams::new(n, 0.5, 16.0);
        assert_eq!(p.case(), Case::One);
        for seed in 0..20 {
            let cfg = AdversaryConfig::new(ManipulationKind::Erasure, RateMode::BudgetManaging, 16.0).unwrap();
            let adv = if seed % 2 == 0 {
                adversary_subset_eraser(96).unwrap()
            } else {
                adversary_pair_eraser()
            };
            let mut s = open_session(&f, cfg, adv, seed);
            let out = online_linearity_tester(&mut s, &p).unwrap();
            assert!(out.accepted());
            assert_eq!(out.queries_used, 6 * 97);
        }
    }

    #[test]
    fn far_function_is_usually_rejected_in_case_one() {
        let n = 288;
        let f = make_junta_far(n, 2, 3).unwrap();
        let p = TesterParams::new(n, 0.25, 1.0);
        assert_eq!(p.batch_size(), 160);
        assert!(p.case() == Case::Two);
        let p = TesterParams {
            force_case_one: true,
            ..p
        };
        let mut rejects = 0;
        for seed in 0..50 {
            let mut s = open_session(&f, AdversaryConfig::none(), adversary_null(), seed);
            let out = online_linearity_tester(&mut s, &p).unwrap();
            if let Some(w) = &out.witness {
                assert!(w.is_consistent());
                rejects += 1;
            }
        }
        assert!(rejects >= 40, "{rejects}/50");
    }
}
