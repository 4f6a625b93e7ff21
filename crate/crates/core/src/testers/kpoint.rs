use crate::error::{Error, Result};
use crate::f2::PointF2;
use crate::oracle::OracleSession;
use crate::testers::outcome::{Branch, TestOutcome, Verdict, Witness};
use crate::testers::params::TesterParams;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RoundResult {
    Pass,
    Fail(Witness),
    ErasureSeen,
}

/// One round of the k-point test: `k` uniform points, then their XOR.
///
/// Fails iff all `k + 1` answers are values whose `±1` product is `-1`.
pub fn k_point_round(session: &mut OracleSession<'_>, k: u32) -> Result<RoundResult> {
    if k < 2 || !k.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("k = {k} must be even and at least 2")));
    }
    let mut points = Vec::with_capacity(k as usize + 1);
    let mut answers = Vec::with_capacity(k as usize + 1);
    let mut erased = false;
    let mut y = PointF2::zero(session.dim())?;
    for _ in 0..k {
        let (x, a) = session.sample_uniform()?;
        y.xor_assign(&x)?;
        erased |= a.is_erased();
        points.push(x);
        answers.push(a);
    }
    let a = session.query(&y)?;
    erased |= a.is_erased();
    points.push(y);
    answers.push(a);
    if erased {
        return Ok(RoundResult::ErasureSeen);
    }
    let bits: Vec<bool> = answers.iter().map(|a| a.value().expect("no erasures")).collect();
    if bits.iter().fold(false, |acc, &b| acc ^ b) {
        Ok(RoundResult::Fail(Witness::XorProduct { points, answers: bits }))
    } else {
        Ok(RoundResult::Pass)
    }
}

/// `rounds` independent k-point rounds; rejects on the first failure.
pub fn kpoint_tester(session: &mut OracleSession<'_>, k: u32, rounds: u32) -> Result<TestOutcome> {
    let start_calls = session.calls();
    let start_erased = session.erased_answers();
    let mut erased_rounds = 0;
    let mut witness = None;
    let mut iterations = 0;
    for _ in 0..rounds {
        iterations += 1;
        match k_point_round(session, k)? {
            RoundResult::Pass => {}
            RoundResult::ErasureSeen => erased_rounds += 1,
            RoundResult::Fail(w) => {
                witness = Some(w);
                break;
            }
        }
    }
    Ok(TestOutcome {
        verdict: if witness.is_some() { Verdict::Reject } else { Verdict::Accept },
        branch: Branch::KPoint,
        queries_used: session.calls() - start_calls,
        erasures_seen: session.erased_answers() - start_erased,
        erased_iterations: erased_rounds,
        iterations,
        witness,
    })
}

/// Baseline 3-point test repeated `ceil(3/eps)` times. An erased answer counts as a pass.
pub fn blr3_repeated(session: &mut OracleSession<'_>, eps: f64) -> Result<TestOutcome> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must lie in (0, 1)")));
    }
    let rounds = TesterParams {
        eps,
        ..TesterParams::default()
    }
    .repetition_count();
    let mut out = kpoint_tester(session, 2, rounds)?;
    out.branch = Branch::Blr3;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2::{AffineX1, BoolFn, BoolFunction, LinearFn};
    use crate::oracle::{adversary_null, open_session, AdversaryConfig};

    #[test]
    fn linear_always_passes() {
        let f = LinearFn::new(PointF2::from_index(12, 0x5a5).unwrap());
        let mut s = open_session(&f, AdversaryConfig::none(), adversary_null(), 0);
        for k in [2, 4, 6, 10] {
            for _ in 0..200 {
                assert_eq!(k_point_round(&mut s, k).unwrap(), RoundResult::Pass);
            }
        }
    }

    #[test]
    fn affine_always_fails() {
        let f = AffineX1::new(3).unwrap();
        let mut s = open_session(&f, AdversaryConfig::none(), adversary_null(), 1);
        for k in [2, 4, 8] {
            for _ in 0..100 {
                let RoundResult::Fail(w) = k_point_round(&mut s, k).unwrap() else {
                    panic!("affine function passed a round");
                };
                assert!(w.is_consistent());
            }
        }
    }

    /// Exhaustive check at n = 3: every tuple of (x1, x2) fails for 1 + x1.
    #[test]
    fn affine_fails_on_every_pair_exhaustively() {
        let f = BoolFn::materialize(&AffineX1::new(3).unwrap()).unwrap();
        for a in 0..8u64 {
            for b in 0..8u64 {
                let bits = [a, b, a ^ b].map(|i| f.get(i));
                assert!(bits.iter().fold(false, |acc, &x| acc ^ x));
            }
        }
        assert!(f.eval(&PointF2::zero(3).unwrap()));
    }

    #[test]
    fn odd_k_is_rejected() {
        let f = LinearFn::zero(4).unwrap();
        let mut s = open_session(&f, AdversaryConfig::none(), adversary_null(), 0);
        assert!(k_point_round(&mut s, 3).is_err());
        assert!(k_point_round(&mut s, 0).is_err());
    }

    #[test]
    fn blr3_round_count() {
        let f = LinearFn::zero(10).unwrap();
        let mut s = open_session(&f, AdversaryConfig::none(), adversary_null(), 0);
        let out = blr3_repeated(&mut s, 0.1).unwrap();
        assert!(out.accepted());
        assert_eq!(out.iterations, 30);
        assert_eq!(out.queries_used, 90);
    }

    /// Per-round violation probability of the 3-point test at n = 10, by
    /// enumerating every (x, y) pair, against the Monte Carlo estimate.
    #[test]
    fn blr3_round_rate_matches_exhaustive_enumeration() {
        let f = crate::f2::make_far_function(10, 103, 8).unwrap();
        let size = f.len() as u64;
        let mut bad = 0u64;
        for x in 0..size {
            for y in 0..size {
                bad += (f.get(x) ^ f.get(y) ^ f.get(x ^ y)) as u64;
            }
        }
        let exact = bad as f64 / (size * size) as f64;
        let mut s = open_session(&f, AdversaryConfig::none(), adversary_null(), 3);
        let trials = 40_000;
        let mut fails = 0;
        for _ in 0..trials {
            if matches!(k_point_round(&mut s, 2).unwrap(), RoundResult::Fail(_)) {
                fails += 1;
            }
        }
        let rate = fails as f64 / trials as f64;
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((rate - exact).abs() <= 4.0 * sigma, "{rate} vs {exact}");
    }
}
