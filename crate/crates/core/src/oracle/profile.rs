use crate::error::{Error, Result};
use crate::f2::BoolFunction;
use crate::oracle::adversary::adversary_null;
use crate::oracle::session::{AdversaryConfig, OracleSession};
use crate::seed::{trial_rng, Stream};

/// Estimates, for every point `z` of `{0,1}^n`, the fraction of runs in which
/// `z` is among the first `m0` distinct points the tester queries.
///
/// The tester runs against a null-adversary session; its own result is ignored.
pub fn profile_query_frequencies<T>(
    tester: impl Fn(&mut OracleSession<'_>) -> Result<T>,
    f: &dyn BoolFunction,
    trials: u64,
    m0: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let n = f.dim();
    if n > crate::f2::MAX_TABLE_DIM {
        return Err(Error::UnsupportedDimension {
            n,
            reason: "query profiles are tabulated over all 2^n points",
        });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("profile needs at least one trial".into()));
    }
    let mut counts = vec![0u64; 1usize << n];
    for trial in 0..trials {
        let rng = trial_rng(seed, trial, Stream::Profile);
        let mut session = OracleSession::with_rng(f, AdversaryConfig::none(), adversary_null(), rng);
        tester(&mut session)?;
        for x in session.queries().iter().take(m0) {
            counts[x.index().expect("n <= 30") as usize] += 1;
        }
    }
    Ok(counts.into_iter().map(|c| c as f64 / trials as f64).collect())
}
