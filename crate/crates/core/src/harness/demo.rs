//! The manipulation-rate lower bound as a runnable experiment.
//!
//! A linear `g` and a far function `g_{D'}` are made indistinguishable to a
//! tester with few queries: once the first `m0` answers are in, a corruption
//! adversary rewrites every cell of `D'` back to `g`. The cells of `D'` are
//! the ones the tester is least likely to have queried by then.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2::{far_numerator, AffineX1, BoolFn, BoolFunction, LinearFn, PointF2};
use crate::harness::runner::parallel_trials;
use crate::harness::stats::{abs_gap_interval, BoundCheck, Interval, Proportion, Relation, Rule, Z95};
use crate::oracle::{
    adversary_dprime, adversary_null, profile_query_frequencies, AdversaryConfig, DPrimeMode, ManipulationKind,
    OracleSession, RateMode, TranscriptEvent,
};
use crate::seed::{trial_rng, Stream};
use crate::testers::{run_tester, TesterId, TesterParams};

/// Gap below which the two inputs count as indistinguishable.
pub const INDISTINGUISHABLE_GAP: f64 = 0.15;
/// Gap the unmanipulated control must exceed.
pub const CONTROL_GAP: f64 = 1.0 / 3.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoConfig {
    pub n: u32,
    pub eps: f64,
    pub tester: TesterId,
    pub trials: u64,
    pub profile_trials: u64,
    pub seed: u64,
}

impl DemoConfig {
    pub fn new(n: u32, eps: f64) -> Self {
        Self {
            n,
            eps,
            tester: TesterId::Auto,
            trials: 4000,
            profile_trials: 2000,
            seed: 0,
        }
    }

    /// `ℓ = ⌈ε 2^n⌉` cells to hide.
    pub fn ell(&self) -> Result<u64> {
        far_numerator(self.n, self.eps)
    }

    /// `t = ⌈20 ε² 2^n⌉`.
    pub fn rate(&self) -> f64 {
        (20.0 * self.eps * self.eps * f64::from(self.n).exp2() - 1e-9).ceil()
    }

    /// `m0 = ⌈ℓ / t⌉`: after this many answers the budget covers all of `D'`.
    pub fn m0(&self) -> Result<u64> {
        Ok((self.ell()? as f64 / self.rate() - 1e-12).ceil().max(1.0) as u64)
    }

    /// Tester parameters at rate `t`, with the admissibility check off:
    /// the point of the demo is a rate outside the admissible regime.
    pub fn tester_params(&self) -> TesterParams {
        TesterParams {
            check_regime: false,
            ..TesterParams::new(self.n, self.eps, self.rate())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoArm {
    pub name: String,
    pub accept_g: f64,
    pub accept_gd: f64,
    pub gap: f64,
    pub gap_ci: Interval,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    pub config: DemoConfig,
    pub ell: u64,
    pub t: f64,
    pub m0: u64,
    /// Trials in which every cell of `D'` was rewritten within the first `m0` answers.
    pub completed_trials: u64,
    pub arms: Vec<DemoArm>,
    pub demonstrative: bool,
    pub bounds: Vec<BoundCheck>,
}

impl DemoReport {
    pub fn all_passed(&self) -> bool {
        self.bounds.iter().all(|b| b.passed)
    }
}

/// The `ℓ` points of `D` least often among the tester's first `m0` distinct
/// queries on `g`, ties broken by index.
pub fn least_frequent(freq: &[f64], d: &[PointF2], ell: usize) -> Result<Vec<PointF2>> {
    if d.len() < ell {
        return Err(Error::InvalidParameter(format!("|D| = {} is smaller than ell = {ell}", d.len())));
    }
    let mut ranked: Vec<(f64, u64, &PointF2)> = d
        .iter()
        .map(|x| {
            let i = x.index().expect("tabulated dimension");
            (freq[i as usize], i, x)
        })
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(ranked.into_iter().take(ell).map(|(_, _, x)| x.clone()).collect())
}

#[derive(Clone, Copy, Debug, Default)]
struct ArmTally {
    accept_g: u64,
    accept_gd: u64,
    completed: u64,
}

impl ArmTally {
    fn merge(self, o: Self) -> Self {
        Self {
            accept_g: self.accept_g + o.accept_g,
            accept_gd: self.accept_gd + o.accept_gd,
            completed: self.completed + o.completed,
        }
    }
}

/// Manipulations recorded before the `(m0+1)`-th distinct query.
fn manipulations_within(events: &[TranscriptEvent], m0: u64) -> u64 {
    let mut queries = 0;
    let mut manipulations = 0;
    for e in events {
        match e {
            TranscriptEvent::Query(..) => {
                queries += 1;
                if queries > m0 {
                    break;
                }
            }
            TranscriptEvent::Manipulation(..) => manipulations += 1,
        }
    }
    manipulations
}

pub fn impossibility_demo(cfg: &DemoConfig) -> Result<DemoReport> {
    if cfg.trials == 0 || cfg.profile_trials == 0 {
        return Err(Error::InvalidParameter("demo needs at least one trial".into()));
    }
    let n = cfg.n;
    let ell = cfg.ell()?;
    let t = cfg.rate();
    let m0 = cfg.m0()?;
    let params = cfg.tester_params();
    params.validate()?;
    let id = cfg.tester;

    let g = LinearFn::zero(n)?;
    let f_no = AffineX1::new(n)?;
    let d = BoolFn::materialize(&g)?.disagreement_set(&f_no)?;
    let freq = profile_query_frequencies(
        |s| run_tester(id, s, &params, 4),
        &g,
        cfg.profile_trials,
        m0 as usize,
        cfg.seed,
    )?;
    let targets: Arc<[PointF2]> = least_frequent(&freq, &d, ell as usize)?.into();
    let mut gd = BoolFn::materialize(&g)?;
    for x in targets.iter() {
        gd.flip(x.index().expect("tabulated dimension"));
    }

    let corrupt = AdversaryConfig::new(ManipulationKind::Corruption, RateMode::FixedRate, t)?;
    let run = |f: &dyn BoolFunction, dprime: bool, trial: u64| -> Result<(bool, Vec<TranscriptEvent>)> {
        let rng = trial_rng(cfg.seed, trial, Stream::Session);
        let mut session = if dprime {
            let strategy = adversary_dprime(targets.clone(), DPrimeMode::copy_from(&g, &targets))?;
            OracleSession::with_rng(f, corrupt, strategy, rng)
        } else {
            OracleSession::with_rng(f, AdversaryConfig::none(), adversary_null(), rng)
        };
        let out = run_tester(id, &mut session, &params, 4)?;
        Ok((out.accepted(), session.events().to_vec()))
    };

    let mut arms = Vec::new();
    let mut bounds = Vec::new();
    let mut completed_trials = 0;
    for dprime in [true, false] {
        let tally = parallel_trials(
            cfg.trials,
            |trial| {
                let (acc_g, _) = run(&g, dprime, trial)?;
                let (acc_gd, events) = run(&gd, dprime, trial)?;
                Ok(ArmTally {
                    accept_g: u64::from(acc_g),
                    accept_gd: u64::from(acc_gd),
                    completed: u64::from(manipulations_within(&events, m0) == ell),
                })
            },
            ArmTally::merge,
        )?;
        let pg = Proportion::new(tally.accept_g, cfg.trials);
        let pd = Proportion::new(tally.accept_gd, cfg.trials);
        let ci = abs_gap_interval(pg, pd, Z95);
        let gap = (pg.rate() - pd.rate()).abs();
        let name = if dprime { "dprime" } else { "control" };
        if dprime {
            completed_trials = tally.completed;
            bounds.push(BoundCheck::interval(
                "dprime: acceptance gap between g and g_D'",
                Relation::AtMost,
                INDISTINGUISHABLE_GAP,
                gap,
                ci,
                Rule::WilsonStrict { z: Z95 },
            ));
            bounds.push(BoundCheck::exact(
                "dprime: D' fully rewritten within m0 answers (trials)",
                Relation::Equals,
                cfg.trials as f64,
                tally.completed as f64,
            ));
        } else {
            bounds.push(BoundCheck::interval(
                "control: acceptance gap without manipulation",
                Relation::AtLeast,
                CONTROL_GAP,
                gap,
                ci,
                Rule::WilsonStrict { z: Z95 },
            ));
        }
        arms.push(DemoArm {
            name: name.to_string(),
            accept_g: pg.rate(),
            accept_gd: pd.rate(),
            gap,
            gap_ci: ci,
        });
    }
    bounds.push(BoundCheck::exact("budget covers D': m0 * t >= ell", Relation::AtLeast, ell as f64, m0 as f64 * t));

    Ok(DemoReport {
        config: cfg.clone(),
        ell,
        t,
        m0,
        completed_trials,
        arms,
        demonstrative: true,
        bounds,
    })
}
