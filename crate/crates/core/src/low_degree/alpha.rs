use rand::Rng;

use crate::real::distribution::standard_gaussian;
use crate::real::oracle::RealOracle;
use crate::real::scalar::{axpy, Real};

/// `α_i = (-1)^{i+1} C(d+1, i)` for `i = 0..=d+1`: the weights of the
/// `(d+1)`-st finite difference, negated so that `α_0 = -1`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaCoeffs {
    d: u32,
    alpha: Vec<f64>,
}

impl AlphaCoeffs {
    pub fn new(d: u32) -> Self {
        let mut alpha = Vec::with_capacity(d as usize + 2);
        let mut binom = 1.0f64;
        for i in 0..=d + 1 {
            let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
            alpha.push(sign * binom);
            binom = binom * f64::from(d + 1 - i) / f64::from(i + 1);
        }
        Self { d, alpha }
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.alpha
    }

    pub fn get(&self, i: usize) -> f64 {
        self.alpha[i]
    }
}

/// `Σ_{i=lo}^{d+1} α_i f(p + i q)` and `Σ |α_i f(p + i q)|`.
fn weighted_line_sum(f: &mut RealOracle<'_>, alpha: &AlphaCoeffs, p: &[Real], q: &[Real], lo: usize) -> (Real, Real) {
    let mut sum = Real::ZERO;
    let mut mag = Real::ZERO;
    for (i, &a) in alpha.as_slice().iter().enumerate().skip(lo) {
        let term = f.query(&axpy(p, Real::new(i as f64), q)) * a;
        sum += term;
        mag += term.abs();
    }
    (sum, mag)
}

/// The directional corrector `g_q(p) = Σ_{i=1}^{d+1} α_i f(p + i q)`, with
/// the magnitude `Σ |α_i f(p + i q)|` of its terms. `d + 1` queries.
pub fn g_q_lowdeg(f: &mut RealOracle<'_>, alpha: &AlphaCoeffs, p: &[Real], q: &[Real]) -> (Real, Real) {
    weighted_line_sum(f, alpha, p, q, 1)
}

/// The full finite difference `Σ_{i=0}^{d+1} α_i f(p + i q)` with its
/// tolerance allowance `τ_rel Σ |α_i f(p + i q)|`. `d + 2` queries.
pub fn finite_difference(f: &mut RealOracle<'_>, alpha: &AlphaCoeffs, p: &[Real], q: &[Real]) -> (Real, Real) {
    let (sum, mag) = weighted_line_sum(f, alpha, p, q, 0);
    (sum, mag * f.tolerance().rel)
}

/// `N(0, σ² I)` in `n` dimensions.
pub(crate) fn scaled_gaussian<R: Rng + ?Sized>(n: usize, sigma: f64, rng: &mut R) -> Vec<Real> {
    let s = Real::new(sigma);
    standard_gaussian(n, rng).into_iter().map(|x| x * s).collect()
}
