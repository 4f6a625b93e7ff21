//! Linearity testers over `F_2^n`.

pub mod dispatch;
pub mod kpoint;
pub mod online;
pub mod outcome;
pub mod params;
pub mod sample;

pub use dispatch::{doubly_optimal_tester, run_tester};
pub use kpoint::{blr3_repeated, k_point_round, kpoint_tester, RoundResult};
pub use online::{online_iteration, online_linearity_tester, IterationResult};
pub use outcome::{Branch, TestOutcome, Verdict, Witness};
pub use params::{batch_size, Case, TesterId, TesterParams, DEFAULT_REGIME_CONSTANT};
pub use sample::gr_sample_tester;
