use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::f2::function::{BoolFn, BoolFunction, LinearFn};
use crate::f2::point::PointF2;

/// An exact rational `num / 2^log2_den`, kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dyadic {
    pub num: u64,
    pub log2_den: u32,
}

impl Dyadic {
    pub fn new(num: u64, log2_den: u32) -> Self {
        let mut d = Self { num, log2_den };
        while d.log2_den > 0 && d.num.is_multiple_of(2) {
            d.num /= 2;
            d.log2_den -= 1;
        }
        if d.num == 0 {
            d.log2_den = 0;
        }
        d
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (self.log2_den as f64).exp2()
    }

    /// Numerator when written over `2^n`, if the denominator divides `2^n`.
    pub fn numerator_over(self, n: u32) -> Option<u64> {
        (self.log2_den <= n).then(|| self.num << (n - self.log2_den))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let k = self.log2_den.max(other.log2_den);
        let a = (self.num as u128) << (k - self.log2_den);
        let b = (other.num as u128) << (k - other.log2_den);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2_den == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u64 << self.log2_den)
        }
    }
}

/// Walsh–Hadamard spectrum of the `±1` view of a Boolean function.
///
/// Stored unnormalized as exact integers `W(a) = Σ_x (-1)^{f(x) + <a,x>}`;
/// the normalized coefficient is `W(a) / 2^n`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    n: u32,
    walsh: Vec<i32>,
}

impl Spectrum {
    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn raw(&self) -> &[i32] {
        &self.walsh
    }

    pub fn coeff(&self, index: u64) -> f64 {
        self.walsh[index as usize] as f64 / (self.n as f64).exp2()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = f64> + '_ {
        let scale = (self.n as f64).exp2();
        self.walsh.iter().map(move |&w| w as f64 / scale)
    }

    /// `Σ W(a)^2 == 4^n`, checked in exact integer arithmetic.
    pub fn parseval_holds(&self) -> bool {
        let total: u128 = self.walsh.iter().map(|&w| (w as i64 * w as i64) as u128).sum();
        total == 1u128 << (2 * self.n)
    }

    /// Largest coefficient and its index; ties go to the lowest index.
    pub fn argmax(&self) -> (u64, i32) {
        let mut best = (0u64, self.walsh[0]);
        for (a, &w) in self.walsh.iter().enumerate().skip(1) {
            if w > best.1 {
                best = (a as u64, w);
            }
        }
        best
    }
}

/// Fast in-place transform in `O(n 2^n)` integer operations.
pub fn walsh_hadamard(f: &BoolFn) -> Spectrum {
    let n = f.dim();
    let len = f.len();
    let mut w: Vec<i32> = (0..len as u64).map(|i| if f.get(i) { -1 } else { 1 }).collect();
    let mut h = 1;
    while h < len {
        for block in w.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
    Spectrum { n, walsh: w }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearDistance {
    pub distance: Dyadic,
    pub nearest: LinearFn,
}

/// Exact distance to the nearest linear function, `(2^n - max_a W(a)) / 2^{n+1}`.
pub fn distance_to_linear(f: &BoolFn) -> Result<LinearDistance> {
    let n = f.dim();
    let spectrum = walsh_hadamard(f);
    let (a, w) = spectrum.argmax();
    let disagreements = ((1i64 << n) - w as i64) / 2;
    Ok(LinearDistance {
        distance: Dyadic::new(disagreements as u64, n),
        nearest: LinearFn::new(PointF2::from_index(n, a)?),
    })
}
