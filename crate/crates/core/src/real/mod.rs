//! Real-valued functions: double-double arithmetic, counted oracles,
//! samplable distributions and the additivity tester.

pub mod additivity;
pub mod correction;
pub mod distribution;
pub mod oracle;
pub mod scalar;
pub mod zoo;

pub use additivity::{
    additivity_tester, additivity_trial, test_additivity, RealCheck, AdditivityConfig, Phase, RealTestOutcome,
    RealWitness,
};
pub use correction::{contract, g_direction, kappa, query_g_additive};
pub use distribution::{standard_gaussian, Component, Distribution};
pub use oracle::{RealFunction, RealOracle, Tolerance};
pub use scalar::{norm, to_point, Real, RealPoint};
pub use zoo::{Monomial, ZooFunction};
