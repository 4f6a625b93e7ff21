use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::f2::function::{BoolFn, JuntaFarFn, LinearFn};
use crate::f2::point::PointF2;
use crate::f2::walsh::{distance_to_linear, Dyadic};

/// A random linear function with exactly `ell` uniformly chosen points flipped.
///
/// For `ell < 2^n / 4` the result is at distance exactly `ell / 2^n` from
/// linearity: every other linear function is at least `1/2 - ell/2^n` away.
/// The distance is re-checked with the Walsh–Hadamard oracle before returning.
pub fn make_far_function(n: u32, ell: u64, seed: u64) -> Result<BoolFn> {
    let size = BoolFn::zero(n)?.len() as u64;
    if 4 * ell >= size {
        return Err(Error::InvalidParameter(format!(
            "distance {ell}/2^{n} must be below 1/4 for an exact far instance"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = LinearFn::new(PointF2::random(n, &mut rng));
    let mut f = g.to_table()?;
    for idx in sample(&mut rng, size as usize, ell as usize) {
        f.flip(idx as u64);
    }
    let d = distance_to_linear(&f)?;
    if d.distance != Dyadic::new(ell, n) {
        return Err(Error::Internal(format!(
            "far instance has distance {} instead of {ell}/2^{n}",
            d.distance
        )));
    }
    Ok(f)
}

/// Smallest flip count `ell` with `ell / 2^n >= eps`.
pub fn far_numerator(n: u32, eps: f64) -> Result<u64> {
    if !(0.0..1.0).contains(&eps) || n > 62 {
        return Err(Error::InvalidParameter(format!("eps = {eps} out of range for n = {n}")));
    }
    Ok((eps * (n as f64).exp2() - 1e-9).ceil().max(0.0) as u64)
}

/// An instance at distance exactly `2^-k` with `k >= 2`, valid for any `n >= k`.
pub fn make_junta_far(n: u32, k: u32, seed: u64) -> Result<JuntaFarFn> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    JuntaFarFn::new(LinearFn::new(PointF2::random(n, &mut rng)), k)
}
