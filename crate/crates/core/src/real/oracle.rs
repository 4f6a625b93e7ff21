use serde::{Deserialize, Serialize};

use crate::real::scalar::Real;

/// A deterministic function `R^n -> R`.
pub trait RealFunction: Send + Sync {
    fn arity(&self) -> usize;
    fn eval(&self, x: &[Real]) -> Real;
}

/// Approximate equality `|a - b| <= abs + rel * max(|a|, |b|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-9, rel: 1e-9 }
    }
}

impl Tolerance {
    pub fn approx_eq(&self, a: Real, b: Real) -> bool {
        self.excess(a, b, Real::ZERO) <= 0.0
    }

    /// Allowed deviation for a quantity whose operands have total magnitude `scale`,
    /// plus an additive rounding allowance `slack`.
    pub fn allowance(&self, scale: Real, slack: Real) -> f64 {
        self.abs + self.rel * scale.to_f64() + slack.to_f64()
    }

    /// `|a - b|` minus the allowance for comparing `a` and `b`; positive means a violation.
    pub fn excess(&self, a: Real, b: Real, slack: Real) -> f64 {
        let diff = (a - b).abs().to_f64();
        diff - self.allowance(a.abs().max(b.abs()), slack)
    }
}

/// Counted black-box access to a real function.
pub struct RealOracle<'f> {
    f: &'f dyn RealFunction,
    queries: u64,
    tolerance: Tolerance,
}

impl<'f> RealOracle<'f> {
    pub fn new(f: &'f dyn RealFunction, tolerance: Tolerance) -> Self {
        Self {
            f,
            queries: 0,
            tolerance,
        }
    }

    pub fn arity(&self) -> usize {
        self.f.arity()
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tolerance
    }

    pub fn query(&mut self, x: &[Real]) -> Real {
        debug_assert_eq!(x.len(), self.f.arity());
        self.queries += 1;
        self.f.eval(x)
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    /// Evaluates without counting; used only to re-validate witnesses.
    pub fn function(&self) -> &'f dyn RealFunction {
        self.f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Sum;

    impl RealFunction for Sum {
        fn arity(&self) -> usize {
            2
        }

        fn eval(&self, x: &[Real]) -> Real {
            x[0] + x[1]
        }
    }

    #[test]
    fn counter_increments_once_per_query() {
        let mut o = RealOracle::new(&Sum, Tolerance::default());
        let p = [Real::new(1.0), Real::new(2.0)];
        assert_eq!(o.query(&p).to_f64(), 3.0);
        assert_eq!(o.query(&p).to_f64(), 3.0);
        assert_eq!(o.queries(), 2);
    }

    #[test]
    fn tolerance_is_relative_plus_absolute() {
        let t = Tolerance::default();
        assert!(t.approx_eq(Real::new(1e6), Real::new(1e6 + 1e-4)));
        assert!(!t.approx_eq(Real::new(1e6), Real::new(1e6 + 1e-2)));
        assert!(t.approx_eq(Real::new(0.0), Real::new(5e-10)));
        assert!(!t.approx_eq(Real::new(0.0), Real::new(5e-9)));
    }
}
