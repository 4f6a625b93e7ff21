//! Arithmetic over `F_2^n`, Boolean function representations and exact
//! distance-to-linearity via the Walsh–Hadamard transform.

pub mod function;
pub mod generate;
pub mod linalg;
pub mod point;
pub mod walsh;

pub use function::{AffineX1, BoolFn, BoolFunction, JuntaFarFn, LinearFn, MAX_TABLE_DIM};
pub use generate::{far_numerator, make_far_function, make_junta_far};
pub use linalg::F2Basis;
pub use point::{xor_subset, PointF2};
pub use walsh::{distance_to_linear, walsh_hadamard, Dyadic, LinearDistance, Spectrum};
