use crate::error::Result;
use crate::oracle::OracleSession;
use crate::testers::kpoint::{blr3_repeated, kpoint_tester};
use crate::testers::online::online_linearity_tester;
use crate::testers::outcome::TestOutcome;
use crate::testers::params::{Case, TesterId, TesterParams};
use crate::testers::sample::gr_sample_tester;

/// The query-optimal tester: batch-XOR testing when `m <= n/3`, sample-based
/// testing otherwise. Consumes no randomness before choosing a branch.
pub fn doubly_optimal_tester(session: &mut OracleSession<'_>, params: &TesterParams) -> Result<TestOutcome> {
    params.validate()?;
    params.check_admissible()?;
    match params.case() {
        Case::One => online_linearity_tester(session, params),
        Case::Two if params.force_case_one => online_linearity_tester(session, params),
        Case::Two => gr_sample_tester(session, params),
    }
}

/// Runs a tester by id. `k` is only used by the k-point tester.
pub fn run_tester(id: TesterId, session: &mut OracleSession<'_>, params: &TesterParams, k: u32) -> Result<TestOutcome> {
    match id {
        TesterId::Blr3 => blr3_repeated(session, params.eps),
        TesterId::Kpoint => kpoint_tester(session, k, params.repetition_count()),
        TesterId::Online => online_linearity_tester(session, params),
        TesterId::Sample => gr_sample_tester(session, params),
        TesterId::Auto => doubly_optimal_tester(session, params),
    }
}
