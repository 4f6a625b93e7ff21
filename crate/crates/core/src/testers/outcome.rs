use serde::{Deserialize, Serialize};

use crate::f2::PointF2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Reject,
}

/// Which procedure produced an outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Blr3,
    KPoint,
    Online,
    Sample,
}

/// Evidence of non-linearity collected from first answers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `points` ends with the XOR of the others; the answers sum to 1 mod 2.
    XorProduct { points: Vec<PointF2>, answers: Vec<bool> },
    /// The linear function interpolated from a basis predicts `predicted` at `point`.
    BasisMismatch { point: PointF2, answer: bool, predicted: bool },
}

impl Witness {
    /// Checks the witness's internal consistency (not the oracle it came from).
    pub fn is_consistent(&self) -> bool {
        match self {
            Self::XorProduct { points, answers } => {
                let Some((last, rest)) = points.split_last() else {
                    return false;
                };
                let Ok(zero) = PointF2::zero(last.dim()) else {
                    return false;
                };
                let mut acc = zero;
                for p in rest {
                    if acc.xor_assign(p).is_err() {
                        return false;
                    }
                }
                points.len() == answers.len()
                    && acc == *last
                    && answers.iter().fold(false, |a, &b| a ^ b)
            }
            Self::BasisMismatch { answer, predicted, .. } => answer != predicted,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestOutcome {
    pub verdict: Verdict,
    pub branch: Branch,
    /// Oracle calls made, repeats included.
    pub queries_used: u64,
    /// Erased answers received.
    pub erasures_seen: u64,
    /// Iterations or rounds that received at least one erased answer.
    pub erased_iterations: u64,
    pub iterations: u64,
    pub witness: Option<Witness>,
}

impl TestOutcome {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }
}
