//! Distribution-free testing of degree-`d` polynomials over `R^n`.

pub mod alpha;
pub mod interpolate;
pub mod tester;

pub use alpha::{finite_difference, g_q_lowdeg, AlphaCoeffs};
pub use interpolate::{lagrange_interpolate, lagrange_with_lebesgue, Interpolant};
pub use tester::{
    ball_radius, characterization_queries_per_round, characterization_test, characterization_tests_per_round,
    comparison_queries, low_degree_tester, low_degree_trial, query_g_along, query_g_lowdeg, radial_nodes,
    CorrectedValue, CorrectorBranch, LowDegreeConfig, MAX_DEGREE, NODE_INSET,
};
