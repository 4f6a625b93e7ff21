//! Experiment harness: configs, parallel seeded trials, bound checks and reports.

pub mod config;
pub mod demo;
pub mod report;
pub mod runner;
pub mod stats;

pub use config::{
    AdversarySpec, DistributionSpec, ExperimentConfig, ExperimentParams, ExperimentTester, FunctionSpec, InstanceSpec,
    ReportFormat, StrategyId,
};
pub use demo::{impossibility_demo, DemoArm, DemoConfig, DemoReport};
pub use report::{emit_report, parse_report, TrialReport, CSV_HEADER};
pub use runner::{build_instance, exact_far_function, parallel_trials, run_experiment, with_thread_pool, Tally};
pub use stats::{abs_gap_interval, newcombe_difference, BoundCheck, Interval, Proportion, Relation, Rule, Z95};
