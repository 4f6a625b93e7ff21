use crate::error::{Error, Result};
use crate::f2::{BoolFunction, F2Basis};
use crate::oracle::{OracleAnswer, OracleSession};
use crate::testers::outcome::{Branch, TestOutcome, Verdict, Witness};
use crate::testers::params::TesterParams;

/// Sample-based tester: learn the linear function consistent with `n + slack`
/// uniform samples, then compare it with `ceil(factor/eps)` fresh samples.
///
/// Accepts if the samples do not span `F_2^n`. Any erased sample also ends
/// the run with Accept, which keeps the error one-sided against erasures.
pub fn gr_sample_tester(session: &mut OracleSession<'_>, params: &TesterParams) -> Result<TestOutcome> {
    params.validate()?;
    let n = session.dim();
    if params.n != n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            found: n,
        });
    }
    let start_calls = session.calls();
    let start_erased = session.erased_answers();
    let finish = |session: &OracleSession<'_>, verdict, iterations, witness| TestOutcome {
        verdict,
        branch: Branch::Sample,
        queries_used: session.calls() - start_calls,
        erasures_seen: session.erased_answers() - start_erased,
        erased_iterations: (session.erased_answers() > start_erased) as u64,
        iterations,
        witness,
    };

    let mut basis = F2Basis::new(n)?;
    for _ in 0..params.sample_count() {
        let (x, a) = session.sample_uniform()?;
        match a {
            OracleAnswer::Erased => return Ok(finish(session, Verdict::Accept, 0, None)),
            OracleAnswer::Value(b) => {
                basis.insert(&x, b)?;
            }
        }
    }
    if !basis.is_full() {
        return Ok(finish(session, Verdict::Accept, 0, None));
    }
    let g = basis.solve()?;
    let comparisons = params.comparison_count() as u64;
    for i in 0..comparisons {
        let (z, a) = session.sample_uniform()?;
        match a {
            OracleAnswer::Erased => return Ok(finish(session, Verdict::Accept, i + 1, None)),
            OracleAnswer::Value(b) => {
                let predicted = g.eval(&z);
                if b != predicted {
                    let w = Witness::BasisMismatch {
                        point: z,
                        answer: b,
                        predicted,
                    };
                    return Ok(finish(session, Verdict::Reject, i + 1, Some(w)));
                }
            }
        }
    }
    Ok(finish(session, Verdict::Accept, comparisons, None))
}
