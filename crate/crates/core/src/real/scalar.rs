use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use twofloat::TwoFloat;

/// Double-double scalar (about 106 significant bits).
///
/// The radial extrapolation of the low-degree corrector evaluates a
/// polynomial far outside a ball of radius `(3d)^-6`, which multiplies
/// node roundoff by roughly `(‖p‖/r)^d`; plain `f64` loses every digit.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct Real(TwoFloat);

impl Real {
    pub const ZERO: Real = Real(TwoFloat::from_f64(0.0));
    pub const ONE: Real = Real(TwoFloat::from_f64(1.0));

    /// Unit roundoff of the representation.
    pub const EPSILON: f64 = 1.0 / (1u128 << 104) as f64;

    pub const fn new(x: f64) -> Self {
        Real(TwoFloat::from_f64(x))
    }

    pub fn to_f64(self) -> f64 {
        self.0.hi() + self.0.lo()
    }

    pub fn abs(self) -> Self {
        Real(self.0.abs())
    }

    pub fn sqrt(self) -> Self {
        if self.0 == 0.0 {
            return Self::ZERO;
        }
        // One Newton step on the library root: s + (x - s^2) / (2s).
        let s = Real(self.0.sqrt());
        s + (self - s * s) / (s + s)
    }

    pub fn exp(self) -> Self {
        Real(self.0.exp())
    }

    pub fn powi(self, k: u32) -> Self {
        if k == 0 {
            return Self::ONE;
        }
        let mut base = self;
        let mut e = k;
        while e & 1 == 0 {
            base = base * base;
            e >>= 1;
        }
        let mut acc = base;
        e >>= 1;
        while e > 0 {
            base = base * base;
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
        }
        acc
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.0.hi().is_finite() && self.0.lo().is_finite()
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({:e} + {:e})", self.0.hi(), self.0.lo())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real::new(x)
    }
}

impl Add for Real {
    type Output = Real;
    fn add(self, rhs: Real) -> Real {
        Real(self.0 + rhs.0)
    }
}

impl Sub for Real {
    type Output = Real;
    fn sub(self, rhs: Real) -> Real {
        Real(self.0 - rhs.0)
    }
}

impl Mul for Real {
    type Output = Real;
    fn mul(self, rhs: Real) -> Real {
        Real(self.0 * rhs.0)
    }
}

impl Mul<f64> for Real {
    type Output = Real;
    fn mul(self, rhs: f64) -> Real {
        Real(self.0 * rhs)
    }
}

impl Div for Real {
    type Output = Real;
    /// Library quotient plus one residual correction; the uncorrected
    /// double-double quotient is only accurate to about 53 bits.
    fn div(self, rhs: Real) -> Real {
        let q = self.0 / rhs.0;
        let r = self.0 - q * rhs.0;
        Real(q + r.hi() / rhs.0.hi())
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl AddAssign for Real {
    fn add_assign(&mut self, rhs: Real) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Real {
    fn sub_assign(&mut self, rhs: Real) {
        self.0 -= rhs.0;
    }
}

impl Sum for Real {
    fn sum<I: Iterator<Item = Real>>(iter: I) -> Real {
        iter.fold(Real::ZERO, |a, b| a + b)
    }
}

/// A point of `R^n` in double-double coordinates.
pub type RealPoint = Vec<Real>;

pub fn to_point(xs: &[f64]) -> RealPoint {
    xs.iter().map(|&x| Real::new(x)).collect()
}

pub fn norm(p: &[Real]) -> Real {
    p.iter().map(|&x| x * x).sum::<Real>().sqrt()
}

pub fn scale(p: &[Real], c: Real) -> RealPoint {
    p.iter().map(|&x| x * c).collect()
}

/// `a + c * b`.
pub fn axpy(a: &[Real], c: Real, b: &[Real]) -> RealPoint {
    a.iter().zip(b).map(|(&x, &y)| x + c * y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrected_division_is_exact_to_double_double() {
        let third = Real::ONE / Real::new(3.0);
        let err = (third * Real::new(3.0) - Real::ONE).abs().to_f64();
        assert!(err < 1e-30, "{err}");
        for &(a, b) in &[(1.0, 7.0), (2.5, -0.3), (1e-6, 729.0)] {
            let q = Real::new(a) / Real::new(b);
            let back = (q * Real::new(b) - Real::new(a)).abs().to_f64();
            assert!(back <= 1e-30 * a.abs().max(1.0), "{a}/{b}: {back}");
        }
    }

    #[test]
    fn sqrt_squares_back() {
        for &x in &[2.0, 0.0004, 1e6, 3.7] {
            let s = Real::new(x).sqrt();
            let err = (s * s - Real::new(x)).abs().to_f64();
            assert!(err <= 1e-30 * x, "{x}: {err}");
        }
        assert_eq!(Real::ZERO.sqrt().to_f64(), 0.0);
    }

    #[test]
    fn powi_and_helpers() {
        assert_eq!(Real::new(3.0).powi(4).to_f64(), 81.0);
        assert_eq!(Real::new(3.0).powi(5).to_f64(), 243.0);
        assert_eq!(Real::new(-2.0).powi(3).to_f64(), -8.0);
        assert_eq!(Real::new(1.5).powi(1).to_f64(), 1.5);
        assert_eq!(Real::new(-2.0).powi(0).to_f64(), 1.0);
        let p = to_point(&[3.0, 4.0]);
        assert_eq!(norm(&p).to_f64(), 5.0);
        assert_eq!(axpy(&p, Real::new(2.0), &p)[1].to_f64(), 12.0);
    }
}
