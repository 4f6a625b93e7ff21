use crate::error::{Error, Result};
use crate::real::scalar::Real;

/// Value of an interpolating polynomial together with the Lebesgue function
/// `Σ |ℓ_i(at)|` at the evaluation point, which bounds how much node-value
/// errors are amplified.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interpolant {
    pub value: Real,
    pub lebesgue: f64,
}

/// Evaluates the unique polynomial of degree `< nodes.len()` through `nodes`
/// at `at`, using barycentric weights.
pub fn lagrange_interpolate(nodes: &[(Real, Real)], at: Real) -> Result<Real> {
    lagrange_with_lebesgue(nodes, at).map(|i| i.value)
}

pub fn lagrange_with_lebesgue(nodes: &[(Real, Real)], at: Real) -> Result<Interpolant> {
    if nodes.is_empty() {
        return Err(Error::InvalidParameter("interpolation needs at least one node".into()));
    }
    let mut weights = Vec::with_capacity(nodes.len());
    for (i, &(xi, _)) in nodes.iter().enumerate() {
        let mut prod = Real::ONE;
        for (j, &(xj, _)) in nodes.iter().enumerate() {
            if i != j {
                if xi == xj {
                    return Err(Error::DuplicateNode(xi.to_f64()));
                }
                prod = prod * (xi - xj);
            }
        }
        weights.push(Real::ONE / prod);
    }
    if let Some(&(_, y)) = nodes.iter().find(|(x, _)| *x == at) {
        return Ok(Interpolant {
            value: y,
            lebesgue: 1.0,
        });
    }
    // First barycentric form: ℓ(at) Σ w_i y_i / (at - x_i), which stays
    // forward stable when `at` lies far outside the nodes.
    let ell: Real = nodes.iter().fold(Real::ONE, |acc, &(x, _)| acc * (at - x));
    let mut value = Real::ZERO;
    let mut lebesgue = Real::ZERO;
    for (&(x, y), &w) in nodes.iter().zip(&weights) {
        let li = ell * w / (at - x);
        value += li * y;
        lebesgue += li.abs();
    }
    Ok(Interpolant {
        value,
        lebesgue: lebesgue.to_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn horner(coeffs: &[f64], x: Real) -> Real {
        coeffs.iter().rev().fold(Real::ZERO, |acc, &c| acc * x + Real::new(c))
    }

    #[test]
    fn monomial_through_d_plus_one_points() {
        for d in 1..=8u32 {
            let nodes: Vec<(Real, Real)> = (1..=d + 1)
                .map(|i| {
                    let x = Real::new(i as f64 / (d as f64 + 2.0));
                    (x, x.powi(d))
                })
                .collect();
            let v = lagrange_interpolate(&nodes, Real::ONE).unwrap().to_f64();
            assert!((v - 1.0).abs() < 1e-9, "d={d}: {v}");
        }
    }

    #[test]
    fn single_node_is_constant() {
        let nodes = [(Real::new(0.3), Real::new(-4.0))];
        for at in [-2.0, 0.3, 17.0] {
            assert_eq!(lagrange_interpolate(&nodes, Real::new(at)).unwrap().to_f64(), -4.0);
        }
    }

    #[test]
    fn duplicates_are_rejected() {
        let nodes = [(Real::new(0.5), Real::ONE), (Real::new(0.5), Real::ZERO)];
        assert!(matches!(lagrange_interpolate(&nodes, Real::ONE), Err(Error::DuplicateNode(x)) if x == 0.5));
        assert!(lagrange_interpolate(&[], Real::ONE).is_err());
    }

    #[test]
    fn lebesgue_function_of_two_nodes() {
        // ℓ_0(3) = (3-1)/(0-1) = -2, ℓ_1(3) = 3/1 = 3.
        let nodes = [(Real::ZERO, Real::ZERO), (Real::ONE, Real::ONE)];
        let i = lagrange_with_lebesgue(&nodes, Real::new(3.0)).unwrap();
        assert_eq!(i.value.to_f64(), 3.0);
        assert_eq!(i.lebesgue, 5.0);
    }

    proptest! {
        #[test]
        fn matches_direct_evaluation(
            coeffs in prop::collection::vec(-5.0f64..5.0, 1..=9),
            at in 0.0f64..2.0,
        ) {
            let d = coeffs.len() - 1;
            let nodes: Vec<(Real, Real)> = (0..=d)
                .map(|k| {
                    let theta = std::f64::consts::PI * (2 * k + 1) as f64 / (2 * (d + 1)) as f64;
                    let x = Real::new(1.0 + theta.cos());
                    (x, horner(&coeffs, x))
                })
                .collect();
            let got = lagrange_interpolate(&nodes, Real::new(at)).unwrap().to_f64();
            let want = horner(&coeffs, Real::new(at)).to_f64();
            let scale: f64 = coeffs.iter().map(|c| c.abs()).sum::<f64>() * 2f64.powi(d as i32);
            prop_assert!((got - want).abs() <= 1e-8 * want.abs().max(1e-3 * scale), "{got} vs {want}");
        }
    }
}
