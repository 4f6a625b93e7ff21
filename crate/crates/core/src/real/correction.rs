//! Self-correction of a nearly additive function along random directions.

use rand::Rng;

use crate::real::distribution::standard_gaussian;
use crate::real::oracle::RealOracle;
use crate::real::scalar::{axpy, norm, scale, Real, RealPoint};

/// Radius of the ball into which every point is contracted.
pub const CONTRACTION_RADIUS: f64 = 1.0 / 50.0;

/// `1` inside the ball of radius 1/50, `50 ‖p‖` outside it.
pub fn kappa(p: &[Real]) -> Real {
    let s = norm(p) * 50.0;
    if s <= Real::ONE {
        Real::ONE
    } else {
        s
    }
}

/// `p / κ_p`, always inside the closed ball of radius 1/50.
pub fn contract(p: &[Real]) -> (Real, RealPoint) {
    let k = kappa(p);
    (k, scale(p, Real::ONE / k))
}

/// One directional opinion `κ_p (f(p/κ_p − x) + f(x))`, with its rounding scale
/// `κ_p (|f(p/κ_p − x)| + |f(x)|)`. Two queries.
pub fn g_direction_scaled(f: &mut RealOracle<'_>, p: &[Real], x: &[Real]) -> (Real, Real) {
    let (k, c) = contract(p);
    let a = f.query(&axpy(&c, -Real::ONE, x));
    let b = f.query(x);
    (k * (a + b), k * (a.abs() + b.abs()))
}

pub fn g_direction(f: &mut RealOracle<'_>, p: &[Real], x: &[Real]) -> Real {
    g_direction_scaled(f, p, x).0
}

/// Corrected value at `p` from a single fresh Gaussian direction. Two queries.
pub fn query_g_additive<R: Rng + ?Sized>(f: &mut RealOracle<'_>, p: &[Real], rng: &mut R) -> Real {
    let x = standard_gaussian(p.len(), rng);
    g_direction(f, p, &x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::oracle::{RealFunction, Tolerance};
    use crate::real::scalar::to_point;
    use crate::real::zoo::ZooFunction;
    use crate::seed::{trial_rng, Stream};
    use proptest::prelude::*;

    #[test]
    fn kappa_cases() {
        assert_eq!(kappa(&to_point(&[0.01])).to_f64(), 1.0);
        assert_eq!(kappa(&to_point(&[0.6, 0.8])).to_f64(), 50.0);
        assert_eq!(kappa(&to_point(&[0.0, 0.02])).to_f64(), 1.0);
        assert_eq!(kappa(&to_point(&[0.0, 0.0])).to_f64(), 1.0);
    }

    #[test]
    fn square_example() {
        let f: ZooFunction = "poly(2; 1:2)".parse().unwrap();
        let mut o = RealOracle::new(&f, Tolerance::default());
        let e1 = to_point(&[1.0, 0.0]);
        let v = g_direction(&mut o, &e1, &e1);
        // Independent evaluation: 50 * ((1/50 - 1)^2 + 1).
        let expected = 50.0 * ((0.02f64 - 1.0).powi(2) + 1.0);
        assert!((v.to_f64() - expected).abs() < 1e-12);
        assert!((v.to_f64() - 98.02).abs() < 1e-12);
        assert_eq!(o.queries(), 2);
    }

    #[test]
    fn zero_point_is_negation_check() {
        let f: ZooFunction = "poly(1; 1:3; 2:1)".parse().unwrap();
        let mut o = RealOracle::new(&f, Tolerance::default());
        let x = to_point(&[0.7]);
        let v = g_direction(&mut o, &to_point(&[0.0]), &x);
        let expected = f.eval(&to_point(&[-0.7])) + f.eval(&x);
        assert!((v - expected).abs().to_f64() < 1e-25);
    }

    #[test]
    fn additive_functions_are_direction_independent() {
        let f: ZooFunction = "additive(1,-2,0.5)".parse().unwrap();
        let mut o = RealOracle::new(&f, Tolerance::default());
        let p = to_point(&[3.0, 1.0, -4.0]);
        let truth = f.eval(&p);
        let mut rng = trial_rng(5, 0, Stream::Comparison);
        for _ in 0..100 {
            let v = query_g_additive(&mut o, &p, &mut rng);
            assert!(o.tolerance().approx_eq(v, truth), "{v} vs {truth}");
        }
        assert_eq!(o.queries(), 200);
    }

    #[test]
    fn nearly_additive_corrector_has_majority() {
        // Additive except far out on x_1, where the Gaussian rarely reaches:
        // for any fixed p the directional opinions agree on a strict majority.
        let f = ZooFunction::bump("additive(1,1)".parse().unwrap(), 5.0, 5.0);
        let tol = Tolerance::default();
        let mut o = RealOracle::new(&f, tol);
        let mut rng = trial_rng(9, 0, Stream::Comparison);
        for p in [[6.0, 0.0], [0.001, 0.0], [-3.0, 2.0]] {
            let p = to_point(&p);
            let opinions: Vec<Real> = (0..200).map(|_| query_g_additive(&mut o, &p, &mut rng)).collect();
            let best = opinions
                .iter()
                .map(|a| opinions.iter().filter(|b| tol.approx_eq(*a, **b)).count())
                .max()
                .unwrap();
            assert!(best > 100, "largest cluster {best}");
        }
    }

    proptest! {
        #[test]
        fn kappa_is_homogeneous_outside_the_ball(x in -10.0f64..10.0, y in -10.0f64..10.0, c in 1.0f64..100.0) {
            let p = to_point(&[x, y]);
            prop_assume!(norm(&p).to_f64() > CONTRACTION_RADIUS);
            let lhs = kappa(&scale(&p, Real::new(c))).to_f64();
            let rhs = c * kappa(&p).to_f64();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }

        #[test]
        fn contraction_lands_in_the_ball(x in -1e3f64..1e3, y in -1e3f64..1e3) {
            let (_, c) = contract(&to_point(&[x, y]));
            prop_assert!(norm(&c).to_f64() <= CONTRACTION_RADIUS * (1.0 + 1e-15));
        }
    }
}
