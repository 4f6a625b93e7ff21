use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2::{BoolFunction, PointF2};
use crate::oracle::adversary::{AdversaryStrategy, GameView};

/// What the oracle returns for a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OracleAnswer {
    Value(bool),
    Erased,
}

impl OracleAnswer {
    pub fn value(self) -> Option<bool> {
        match self {
            Self::Value(b) => Some(b),
            Self::Erased => None,
        }
    }

    pub fn is_erased(self) -> bool {
        self == Self::Erased
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "0" => Ok(Self::Value(false)),
            "1" => Ok(Self::Value(true)),
            "⊥" => Ok(Self::Erased),
            other => Err(Error::Parse(format!("bad oracle answer {other:?}"))),
        }
    }
}

impl fmt::Display for OracleAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Value(false) => "0",
            Self::Value(true) => "1",
            Self::Erased => "⊥",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManipulationKind {
    Erasure,
    Corruption,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateMode {
    FixedRate,
    BudgetManaging,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversaryConfig {
    pub kind: ManipulationKind,
    pub rate: RateMode,
    pub t: f64,
}

/// Slack for floors of `i * t` when `t` is a decimal fraction such as 0.1.
const FLOOR_GUARD: f64 = 1e-9;

fn floor_guarded(x: f64) -> u64 {
    (x + FLOOR_GUARD).floor() as u64
}

impl AdversaryConfig {
    pub fn new(kind: ManipulationKind, rate: RateMode, t: f64) -> Result<Self> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidParameter(format!("manipulation rate t = {t} must be finite and >= 0")));
        }
        Ok(Self { kind, rate, t })
    }

    pub fn none() -> Self {
        Self {
            kind: ManipulationKind::Erasure,
            rate: RateMode::BudgetManaging,
            t: 0.0,
        }
    }

    /// Fixed-rate allowance right after the `i`-th answer (`i >= 1`):
    /// `⌊i t⌋ - ⌊(i-1) t⌋`.
    pub fn step_quota(&self, i: u64) -> u64 {
        debug_assert!(i >= 1);
        floor_guarded(i as f64 * self.t) - floor_guarded((i - 1) as f64 * self.t)
    }

    /// Budget-managing cap on `Dist(O_1, O_{i+1})` after the `i`-th answer: `⌊i t⌋`.
    pub fn total_budget(&self, i: u64) -> u64 {
        floor_guarded(i as f64 * self.t)
    }
}

/// A single oracle entry change requested by an adversary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manipulation {
    pub point: PointF2,
    pub new: OracleAnswer,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TranscriptEvent {
    Query(PointF2, OracleAnswer),
    Manipulation(PointF2, OracleAnswer),
}

/// The online-manipulation game around one base function.
///
/// Only cells that currently differ from the base are stored, so the
/// distance `Dist(O_1, O_i)` is the overlay size and wide (implicit)
/// functions cost nothing beyond the cells actually touched.
pub struct OracleSession<'f> {
    base: &'f dyn BoolFunction,
    config: AdversaryConfig,
    adversary: Box<dyn AdversaryStrategy + 'f>,
    rng: ChaCha8Rng,
    overlay: FxHashMap<PointF2, OracleAnswer>,
    first_answer: FxHashMap<PointF2, OracleAnswer>,
    queries: Vec<PointF2>,
    events: Vec<TranscriptEvent>,
    calls: u64,
    manipulations: u64,
    manipulated_hits: u64,
    erased_answers: u64,
    poisoned: bool,
}

pub fn open_session<'f>(
    f: &'f dyn BoolFunction,
    config: AdversaryConfig,
    strategy: Box<dyn AdversaryStrategy + 'f>,
    seed: u64,
) -> OracleSession<'f> {
    OracleSession::with_rng(f, config, strategy, ChaCha8Rng::seed_from_u64(seed))
}

impl<'f> OracleSession<'f> {
    pub fn with_rng(
        f: &'f dyn BoolFunction,
        config: AdversaryConfig,
        strategy: Box<dyn AdversaryStrategy + 'f>,
        rng: ChaCha8Rng,
    ) -> Self {
        Self {
            base: f,
            config,
            adversary: strategy,
            rng,
            overlay: FxHashMap::default(),
            first_answer: FxHashMap::default(),
            queries: Vec::new(),
            events: Vec::new(),
            calls: 0,
            manipulations: 0,
            manipulated_hits: 0,
            erased_answers: 0,
            poisoned: false,
        }
    }

    pub fn dim(&self) -> u32 {
        self.base.dim()
    }

    pub fn config(&self) -> &AdversaryConfig {
        &self.config
    }

    pub fn adversary_name(&self) -> &'static str {
        self.adversary.name()
    }

    /// The session's generator; testers draw all their coins from it.
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Current table entry, without counting as a query.
    pub fn peek(&self, x: &PointF2) -> OracleAnswer {
        self.overlay
            .get(x)
            .copied()
            .unwrap_or_else(|| OracleAnswer::Value(self.base.eval(x)))
    }

    pub fn query(&mut self, x: &PointF2) -> Result<OracleAnswer> {
        if self.poisoned {
            return Err(Error::SessionAborted);
        }
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        self.calls += 1;
        if let Some(&a) = self.first_answer.get(x) {
            return Ok(a);
        }
        let answer = self.peek(x);
        if self.overlay.contains_key(x) {
            self.manipulated_hits += 1;
        }
        if answer.is_erased() {
            self.erased_answers += 1;
        }
        self.first_answer.insert(x.clone(), answer);
        self.queries.push(x.clone());
        self.events.push(TranscriptEvent::Query(x.clone(), answer));
        self.run_adversary()?;
        Ok(answer)
    }

    pub fn sample_uniform(&mut self) -> Result<(PointF2, OracleAnswer)> {
        let x = PointF2::random(self.dim(), &mut self.rng);
        let a = self.query(&x)?;
        Ok((x, a))
    }

    fn run_adversary(&mut self) -> Result<()> {
        let i = self.answered();
        let distance = self.overlay.len() as u64;
        let quota = match self.config.rate {
            RateMode::FixedRate => self.config.step_quota(i),
            RateMode::BudgetManaging => self.config.total_budget(i).saturating_sub(distance),
        };
        let view = GameView {
            base: self.base,
            overlay: &self.overlay,
            first_answer: &self.first_answer,
            queries: &self.queries,
            kind: self.config.kind,
            quota,
        };
        let proposed = self.adversary.respond(&view);
        if proposed.is_empty() {
            return Ok(());
        }
        if let Err(e) = self.apply(proposed, i) {
            self.poisoned = true;
            return Err(e);
        }
        Ok(())
    }

    /// Validates the whole batch against kind and budget before touching the table.
    fn apply(&mut self, proposed: Vec<Manipulation>, i: u64) -> Result<()> {
        let mut seen = FxHashSet::with_capacity_and_hasher(proposed.len(), Default::default());
        let mut changes = Vec::with_capacity(proposed.len());
        let mut distance = self.overlay.len() as i64;
        for m in proposed {
            if m.point.dim() != self.dim() {
                return Err(Error::ProtocolViolation(format!(
                    "manipulation of a {}-bit point in a {}-bit session",
                    m.point.dim(),
                    self.dim()
                )));
            }
            match (self.config.kind, m.new) {
                (ManipulationKind::Erasure, OracleAnswer::Value(_)) => {
                    return Err(Error::ProtocolViolation(format!(
                        "erasure adversary wrote a value at {}",
                        m.point.to_hex()
                    )))
                }
                (ManipulationKind::Corruption, OracleAnswer::Erased) => {
                    return Err(Error::ProtocolViolation(format!(
                        "corruption adversary erased {}",
                        m.point.to_hex()
                    )))
                }
                _ => {}
            }
            if !seen.insert(m.point.clone()) {
                return Err(Error::ProtocolViolation(format!(
                    "point {} manipulated twice in one step",
                    m.point.to_hex()
                )));
            }
            let current = self.peek(&m.point);
            if current == m.new {
                continue;
            }
            let base = OracleAnswer::Value(self.base.eval(&m.point));
            distance += (m.new != base) as i64 - (current != base) as i64;
            changes.push((m, base));
        }
        let step = changes.len() as u64;
        match self.config.rate {
            RateMode::FixedRate => {
                let quota = self.config.step_quota(i);
                if step > quota {
                    return Err(Error::ProtocolViolation(format!(
                        "{step} changes after answer {i} exceed the fixed-rate quota {quota}"
                    )));
                }
            }
            RateMode::BudgetManaging => {
                let cap = self.config.total_budget(i);
                if distance as u64 > cap {
                    return Err(Error::ProtocolViolation(format!(
                        "distance {distance} after answer {i} exceeds the budget {cap}"
                    )));
                }
            }
        }
        for (m, base) in changes {
            if m.new == base {
                self.overlay.remove(&m.point);
            } else {
                self.overlay.insert(m.point.clone(), m.new);
            }
            self.events.push(TranscriptEvent::Manipulation(m.point, m.new));
            self.manipulations += 1;
        }
        debug_assert_eq!(self.overlay.len() as i64, distance);
        Ok(())
    }

    /// Number of distinct points answered so far (the game's `i`).
    pub fn answered(&self) -> u64 {
        self.queries.len() as u64
    }

    /// Number of `query` calls, repeats included.
    pub fn calls(&self) -> u64 {
        self.calls
    }

    pub fn manipulations_applied(&self) -> u64 {
        self.manipulations
    }

    /// `Dist(O_1, O_current)`.
    pub fn distance_from_base(&self) -> u64 {
        self.overlay.len() as u64
    }

    /// Recomputes the distance from scratch by comparing every stored cell to the base.
    pub fn audit_distance(&self) -> u64 {
        self.overlay
            .iter()
            .filter(|(x, a)| **a != OracleAnswer::Value(self.base.eval(x)))
            .count() as u64
    }

    /// Fresh queries that landed on a cell already manipulated.
    pub fn manipulated_hits(&self) -> u64 {
        self.manipulated_hits
    }

    pub fn erased_answers(&self) -> u64 {
        self.erased_answers
    }

    pub fn is_poisoned(&self) -> bool {
        self.poisoned
    }

    /// Distinct queried points in the order they were first answered.
    pub fn queries(&self) -> &[PointF2] {
        &self.queries
    }

    pub fn first_answer(&self, x: &PointF2) -> Option<OracleAnswer> {
        self.first_answer.get(x).copied()
    }

    pub fn is_erased(&self, x: &PointF2) -> bool {
        matches!(self.overlay.get(x), Some(OracleAnswer::Erased))
    }

    pub fn erased_count(&self) -> usize {
        self.overlay.values().filter(|a| a.is_erased()).count()
    }

    pub fn events(&self) -> &[TranscriptEvent] {
        &self.events
    }

    pub fn dump_transcript(&self) -> String {
        dump_transcript(&self.events)
    }
}

/// One line per event: `Q <hex> <answer>` or `M <hex> <new>`.
pub fn dump_transcript(events: &[TranscriptEvent]) -> String {
    let mut out = String::new();
    for e in events {
        let (tag, x, a) = match e {
            TranscriptEvent::Query(x, a) => ('Q', x, a),
            TranscriptEvent::Manipulation(x, a) => ('M', x, a),
        };
        out.push_str(&format!("{tag} {} {a}\n", x.to_hex()));
    }
    out
}

pub fn parse_transcript(n: u32, text: &str) -> Result<Vec<TranscriptEvent>> {
    let mut events = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(tag), Some(hex), Some(ans), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse(format!("line {}: expected `<tag> <hex> <answer>`", lineno + 1)));
        };
        let x = PointF2::from_hex(n, hex)?;
        let a = OracleAnswer::parse(ans)?;
        events.push(match tag {
            "Q" => TranscriptEvent::Query(x, a),
            "M" => TranscriptEvent::Manipulation(x, a),
            other => return Err(Error::Parse(format!("line {}: unknown tag {other:?}", lineno + 1))),
        });
    }
    Ok(events)
}

impl fmt::Debug for OracleSession<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OracleSession")
            .field("n", &self.dim())
            .field("config", &self.config)
            .field("adversary", &self.adversary.name())
            .field("answered", &self.answered())
            .field("distance", &self.distance_from_base())
            .finish()
    }
}
