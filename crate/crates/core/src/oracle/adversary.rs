use std::sync::Arc;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::f2::{BoolFunction, PointF2};
use crate::oracle::session::{Manipulation, ManipulationKind, OracleAnswer};

/// Read-only snapshot of the game handed to an adversary after each new answer.
pub struct GameView<'a> {
    pub(crate) base: &'a dyn BoolFunction,
    pub(crate) overlay: &'a FxHashMap<PointF2, OracleAnswer>,
    pub(crate) first_answer: &'a FxHashMap<PointF2, OracleAnswer>,
    pub(crate) queries: &'a [PointF2],
    pub(crate) kind: ManipulationKind,
    pub(crate) quota: u64,
}

impl GameView<'_> {
    pub fn dim(&self) -> u32 {
        self.base.dim()
    }

    pub fn kind(&self) -> ManipulationKind {
        self.kind
    }

    /// Number of cells that may change in this step (fixed-rate), or the unused
    /// part of the cumulative budget (budget-managing).
    pub fn quota(&self) -> u64 {
        self.quota
    }

    pub fn answered(&self) -> u64 {
        self.queries.len() as u64
    }

    /// Distinct queried points, oldest first.
    pub fn queries(&self) -> &[PointF2] {
        self.queries
    }

    pub fn last_query(&self) -> &PointF2 {
        self.queries.last().expect("adversary runs after an answer")
    }

    pub fn first_answer(&self, x: &PointF2) -> Option<OracleAnswer> {
        self.first_answer.get(x).copied()
    }

    pub fn is_queried(&self, x: &PointF2) -> bool {
        self.first_answer.contains_key(x)
    }

    pub fn is_manipulated(&self, x: &PointF2) -> bool {
        self.overlay.contains_key(x)
    }

    pub fn current(&self, x: &PointF2) -> OracleAnswer {
        self.overlay
            .get(x)
            .copied()
            .unwrap_or_else(|| OracleAnswer::Value(self.base.eval(x)))
    }

    /// The answer this adversary's kind writes to spoil `x`: `⊥` for
    /// erasures, the flipped current value for corruptions.
    pub fn spoil(&self, x: &PointF2) -> OracleAnswer {
        match self.kind {
            ManipulationKind::Erasure => OracleAnswer::Erased,
            ManipulationKind::Corruption => match self.current(x) {
                OracleAnswer::Value(b) => OracleAnswer::Value(!b),
                OracleAnswer::Erased => OracleAnswer::Value(self.base.eval(x)),
            },
        }
    }

    /// Fresh target: never queried and never touched.
    fn untouched(&self, x: &PointF2) -> bool {
        !self.is_queried(x) && !self.is_manipulated(x)
    }
}

/// Policy invoked once after every fresh answer.
pub trait AdversaryStrategy {
    fn name(&self) -> &'static str;
    fn respond(&mut self, view: &GameView<'_>) -> Vec<Manipulation>;
}

pub struct Null;

impl AdversaryStrategy for Null {
    fn name(&self) -> &'static str {
        "null"
    }

    fn respond(&mut self, _: &GameView<'_>) -> Vec<Manipulation> {
        Vec::new()
    }
}

/// Spoils `x ⊕ y` for pairs of queried points, newest pairs first.
///
/// Pending pairs are kept as a stack of frames `(newest, remaining partners)`
/// so unused work from earlier steps is resumed when budget accumulates.
#[derive(Default)]
pub struct PairEraser {
    frames: Vec<(usize, usize)>,
}

impl AdversaryStrategy for PairEraser {
    fn name(&self) -> &'static str {
        "pair_eraser"
    }

    fn respond(&mut self, view: &GameView<'_>) -> Vec<Manipulation> {
        let q = view.queries();
        let newest = q.len() - 1;
        if newest > 0 {
            self.frames.push((newest, newest));
        }
        let mut budget = view.quota();
        let mut out = Vec::new();
        let mut chosen = FxHashSet::default();
        while budget > 0 {
            let Some(frame) = self.frames.last_mut() else {
                break;
            };
            if frame.1 == 0 {
                self.frames.pop();
                continue;
            }
            frame.1 -= 1;
            let mut target = q[frame.0].clone();
            target.xor_assign_unchecked(&q[frame.1]);
            if !view.untouched(&target) || chosen.contains(&target) {
                continue;
            }
            out.push(Manipulation {
                new: view.spoil(&target),
                point: target.clone(),
            });
            chosen.insert(target);
            budget -= 1;
        }
        out
    }
}

/// Treats every run of `m` fresh points (followed by one more query) as a
/// batch and, right after the batch's `m`-th point, spoils XORs of its
/// size-`m/2` subsets in lexicographic order.
pub struct SubsetEraser {
    m: usize,
    half: usize,
}

impl SubsetEraser {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 || !m.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("subset eraser needs an even batch size, got {m}")));
        }
        Ok(Self { m, half: m / 2 })
    }
}

impl AdversaryStrategy for SubsetEraser {
    fn name(&self) -> &'static str {
        "subset_eraser"
    }

    fn respond(&mut self, view: &GameView<'_>) -> Vec<Manipulation> {
        let answered = view.answered() as usize;
        if (answered - 1) % (self.m + 1) != self.m - 1 || view.quota() == 0 {
            return Vec::new();
        }
        let batch = &view.queries()[answered - self.m..];
        let (m, h) = (self.m, self.half);
        let mut combo: Vec<usize> = (0..h).collect();
        let zero = PointF2::zero(view.dim()).expect("session dimension is valid");
        let mut prefix = vec![zero; h + 1];
        let mut from = 0;
        let mut out = Vec::new();
        let mut chosen = FxHashSet::with_capacity_and_hasher(view.quota().min(1 << 16) as usize, Default::default());
        loop {
            for j in from..h {
                let mut p = prefix[j].clone();
                p.xor_assign_unchecked(&batch[combo[j]]);
                prefix[j + 1] = p;
            }
            let y = &prefix[h];
            if view.untouched(y) && !chosen.contains(y) {
                out.push(Manipulation {
                    point: y.clone(),
                    new: view.spoil(y),
                });
                chosen.insert(y.clone());
                if out.len() as u64 == view.quota() {
                    break;
                }
            }
            let Some(i) = (0..h).rev().find(|&i| combo[i] < m - h + i) else {
                break;
            };
            combo[i] += 1;
            for j in i + 1..h {
                combo[j] = combo[j - 1] + 1;
            }
            from = i;
        }
        out
    }
}

#[derive(Clone, Debug)]
pub enum DPrimeMode {
    Erase,
    /// Corrupt each target to the given value (aligned with the target list).
    Corrupt(Arc<[bool]>),
}

impl DPrimeMode {
    /// Copy values from a reference function `g` at each target.
    pub fn copy_from(g: &dyn BoolFunction, targets: &[PointF2]) -> Self {
        Self::Corrupt(targets.iter().map(|x| g.eval(x)).collect())
    }
}

/// Manipulates a fixed target list in order, as many per step as the quota allows.
pub struct DPrime {
    targets: Arc<[PointF2]>,
    mode: DPrimeMode,
    cursor: usize,
}

impl DPrime {
    pub fn new(targets: Arc<[PointF2]>, mode: DPrimeMode) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::InvalidParameter("dprime adversary needs at least one target".into()));
        }
        if let DPrimeMode::Corrupt(values) = &mode {
            if values.len() != targets.len() {
                return Err(Error::InvalidParameter(format!(
                    "{} corruption values for {} targets",
                    values.len(),
                    targets.len()
                )));
            }
        }
        Ok(Self {
            targets,
            mode,
            cursor: 0,
        })
    }

    pub fn exhausted(&self) -> bool {
        self.cursor == self.targets.len()
    }
}

impl AdversaryStrategy for DPrime {
    fn name(&self) -> &'static str {
        "dprime"
    }

    fn respond(&mut self, view: &GameView<'_>) -> Vec<Manipulation> {
        let take = (view.quota() as usize).min(self.targets.len() - self.cursor);
        let out = (self.cursor..self.cursor + take)
            .map(|j| Manipulation {
                point: self.targets[j].clone(),
                new: match &self.mode {
                    DPrimeMode::Erase => OracleAnswer::Erased,
                    DPrimeMode::Corrupt(values) => OracleAnswer::Value(values[j]),
                },
            })
            .collect();
        self.cursor += take;
        out
    }
}

pub fn adversary_null<'a>() -> Box<dyn AdversaryStrategy + 'a> {
    Box::new(Null)
}

pub fn adversary_pair_eraser<'a>() -> Box<dyn AdversaryStrategy + 'a> {
    Box::new(PairEraser::default())
}

pub fn adversary_subset_eraser<'a>(m: usize) -> Result<Box<dyn AdversaryStrategy + 'a>> {
    Ok(Box::new(SubsetEraser::new(m)?))
}

pub fn adversary_dprime<'a>(targets: Arc<[PointF2]>, mode: DPrimeMode) -> Result<Box<dyn AdversaryStrategy + 'a>> {
    Ok(Box::new(DPrime::new(targets, mode)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2::LinearFn;
    use crate::oracle::session::{open_session, AdversaryConfig, RateMode};

    fn erasure(rate: RateMode, t: f64) -> AdversaryConfig {
        AdversaryConfig::new(ManipulationKind::Erasure, rate, t).unwrap()
    }

    #[test]
    fn pair_eraser_blinds_triples_once_budget_covers_pairs() {
        let f = LinearFn::new(PointF2::from_index(16, 0xbeef).unwrap());
        let mut s = open_session(&f, erasure(RateMode::FixedRate, 50.0), adversary_pair_eraser(), 4);
        let mut fresh_pairs = 0;
        for _ in 0..30 {
            let (x, _) = s.sample_uniform().unwrap();
            let (y, _) = s.sample_uniform().unwrap();
            let z = x.xor(&y).unwrap();
            if s.query(&z).unwrap().value().is_some() {
                fresh_pairs += 1;
            }
        }
        assert_eq!(fresh_pairs, 0);
    }

    #[test]
    fn subset_eraser_targets_half_subsets() {
        let m = 6;
        let f = LinearFn::zero(40).unwrap();
        let cfg = erasure(RateMode::BudgetManaging, 4.0);
        let mut s = open_session(&f, cfg, adversary_subset_eraser(m).unwrap(), 1);
        let xs: Vec<PointF2> = (0..m).map(|_| s.sample_uniform().unwrap().0).collect();
        // After m answers the cap is 24; C(6,3) = 20 subsets, all erased.
        assert_eq!(s.erased_count(), 20);
        let y = crate::f2::xor_subset(&xs, &[0, 2, 5]).unwrap();
        assert!(s.is_erased(&y));
        assert!(s.query(&y).unwrap().is_erased());
    }

    #[test]
    fn subset_eraser_uses_lexicographic_order() {
        let f = LinearFn::zero(40).unwrap();
        let cfg = erasure(RateMode::FixedRate, 1.0);
        let mut s = open_session(&f, cfg, adversary_subset_eraser(4).unwrap(), 5);
        let xs: Vec<PointF2> = (0..4).map(|_| s.sample_uniform().unwrap().0).collect();
        let first = crate::f2::xor_subset(&xs, &[0, 1]).unwrap();
        assert_eq!(s.erased_count(), 1);
        assert!(s.is_erased(&first));
    }

    #[test]
    fn dprime_finishes_within_m0_queries() {
        let n = 10;
        let targets: Arc<[PointF2]> = (0..96u64).map(|i| PointF2::from_index(n, 3 * i + 1).unwrap()).collect();
        let f = LinearFn::zero(n).unwrap();
        let t = 40.0;
        let m0 = 3; // m0 * t >= |targets|
        let g = LinearFn::new(PointF2::from_index(n, 1).unwrap());
        let cfg = AdversaryConfig::new(ManipulationKind::Corruption, RateMode::FixedRate, t).unwrap();
        let mode = DPrimeMode::copy_from(&g, &targets);
        let mut s = open_session(&f, cfg, adversary_dprime(targets.clone(), mode).unwrap(), 0);
        for i in 0..m0 {
            s.query(&PointF2::from_index(n, 1000 + i).unwrap()).unwrap();
        }
        for x in targets.iter() {
            assert_eq!(s.peek(x), OracleAnswer::Value(g.eval(x)));
        }
        assert!(DPrime::new(Arc::from(Vec::new()), DPrimeMode::Erase).is_err());
    }

    #[test]
    fn null_never_moves_the_oracle() {
        let f = LinearFn::zero(12).unwrap();
        let mut s = open_session(&f, erasure(RateMode::BudgetManaging, 100.0), adversary_null(), 3);
        for _ in 0..50 {
            s.sample_uniform().unwrap();
            assert_eq!(s.distance_from_base(), 0);
        }
    }
}
