pub mod error;
pub mod f2;
pub mod harness;
pub mod low_degree;
pub mod oracle;
pub mod real;
pub mod seed;
pub mod testers;

pub use error::{Error, Result};
