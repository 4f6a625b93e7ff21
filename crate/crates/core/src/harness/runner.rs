use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::f2::{
    distance_to_linear, far_numerator, make_far_function, AffineX1, BoolFn, BoolFunction, Dyadic, JuntaFarFn, LinearFn,
    PointF2,
};
use crate::harness::config::{AdversarySpec, ExperimentConfig, ExperimentTester, InstanceSpec, StrategyId};
use crate::harness::report::TrialReport;
use crate::harness::stats::{BoundCheck, Proportion, Relation, Rule};
use crate::low_degree::{low_degree_trial, LowDegreeConfig};
use crate::oracle::{
    adversary_null, adversary_pair_eraser, adversary_subset_eraser, AdversaryConfig, AdversaryStrategy, ManipulationKind,
    OracleSession,
};
use crate::real::{additivity_trial, AdditivityConfig, Distribution, Phase, RealFunction, RealTestOutcome, ZooFunction};
use crate::seed::{trial_rng, Stream};
use crate::testers::{run_tester, Branch, Case, TesterId, TesterParams};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "LINTEN_THREADS";

/// Runs `f` on a pool sized by `LINTEN_THREADS` (all cores when unset).
pub fn with_thread_pool<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let k: usize = v
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(k.max(1));
    }
    let pool = builder.build().map_err(|e| Error::Internal(e.to_string()))?;
    Ok(pool.install(f))
}

/// Maps every trial index through `f` in parallel and folds the results with
/// an associative `merge`; the result does not depend on scheduling as long
/// as `merge` is also commutative.
pub fn parallel_trials<T, F, M>(trials: u64, f: F, merge: M) -> Result<T>
where
    T: Send + Default,
    F: Fn(u64) -> Result<T> + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    with_thread_pool(|| {
        (0..trials)
            .into_par_iter()
            .map(&f)
            .try_reduce(T::default, |a, b| Ok(merge(a, b)))
    })?
}

/// What is known about a Boolean instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstanceFacts {
    pub linear: bool,
    /// Certified distance from linearity, when known.
    pub distance: Option<f64>,
}

/// A function at distance at least `eps` from linearity, exactly certified.
///
/// Uses flips of a random linear function below distance 1/4, and a
/// linear-XOR-AND construction when `eps` is a power of two at most 1/4.
pub fn exact_far_function(n: u32, eps: f64, seed: u64) -> Result<(Box<dyn BoolFunction>, Dyadic)> {
    if n <= crate::f2::MAX_TABLE_DIM {
        let ell = far_numerator(n, eps)?;
        if 4 * ell < 1u64 << n {
            let f = make_far_function(n, ell, seed)?;
            return Ok((Box::new(f), Dyadic::new(ell, n)));
        }
    }
    let k = -eps.log2();
    if k.fract() == 0.0 && k >= 2.0 && (k as u32) <= n.min(20) {
        let f = crate::f2::make_junta_far(n, k as u32, seed)?;
        let d = f.certified_distance()?;
        return Ok((Box::new(f), d));
    }
    Err(Error::InvalidParameter(format!(
        "no exact far instance for n = {n}, eps = {eps}: need eps < 1/4 with n <= 30, or eps a power of two"
    )))
}

pub enum BuiltInstance {
    Bool {
        f: Box<dyn BoolFunction>,
        facts: InstanceFacts,
        label: String,
    },
    Real {
        f: ZooFunction,
        dist: Distribution,
        label: String,
    },
}

impl BuiltInstance {
    pub fn label(&self) -> &str {
        match self {
            Self::Bool { label, .. } | Self::Real { label, .. } => label,
        }
    }
}

pub fn build_instance(spec: &InstanceSpec) -> Result<BuiltInstance> {
    let bool_instance = |f: Box<dyn BoolFunction>, facts, label| Ok(BuiltInstance::Bool { f, facts, label });
    match spec {
        InstanceSpec::Linear { n, seed } => {
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(*seed);
            let f = LinearFn::new(PointF2::random(*n, &mut rng));
            let facts = InstanceFacts {
                linear: true,
                distance: Some(0.0),
            };
            bool_instance(Box::new(f), facts, format!("linear(n={n};seed={seed})"))
        }
        InstanceSpec::Far { n, eps, seed } => {
            let (f, d) = exact_far_function(*n, *eps, *seed)?;
            let facts = InstanceFacts {
                linear: false,
                distance: Some(d.to_f64()),
            };
            bool_instance(f, facts, format!("far(n={n};eps={eps};seed={seed};distance={d})"))
        }
        InstanceSpec::JuntaFar { n, k, seed } => {
            let f: JuntaFarFn = crate::f2::make_junta_far(*n, *k, *seed)?;
            let d = f.certified_distance()?;
            let facts = InstanceFacts {
                linear: false,
                distance: Some(d.to_f64()),
            };
            bool_instance(Box::new(f), facts, format!("junta_far(n={n};k={k};seed={seed};distance={d})"))
        }
        InstanceSpec::AffineX1 { n } => {
            let facts = InstanceFacts {
                linear: false,
                distance: Some(0.5),
            };
            bool_instance(Box::new(AffineX1::new(*n)?), facts, format!("affine_x1(n={n})"))
        }
        InstanceSpec::Table { path } => {
            let f = BoolFn::from_text(&std::fs::read_to_string(path)?)?;
            let facts = if f.dim() <= 24 {
                let d = distance_to_linear(&f)?.distance;
                InstanceFacts {
                    linear: d.num == 0,
                    distance: Some(d.to_f64()),
                }
            } else {
                InstanceFacts {
                    linear: false,
                    distance: None,
                }
            };
            bool_instance(Box::new(f), facts, format!("table({})", path.display()))
        }
        InstanceSpec::Real { function, distribution } => {
            let f = function.resolve()?;
            let dist = distribution.resolve()?;
            if dist.dim() != f.arity() {
                return Err(Error::DimensionMismatch {
                    expected: f.arity() as u32,
                    found: dist.dim() as u32,
                });
            }
            let label = format!("real(f={f};dist={dist})");
            Ok(BuiltInstance::Real { f, dist, label })
        }
    }
}

pub fn tester_params(cfg: &ExperimentConfig, n: u32) -> TesterParams {
    let p = &cfg.params;
    TesterParams {
        n,
        eps: p.eps,
        t: cfg.adversary.t,
        regime_constant: p.regime_constant,
        check_regime: p.check_regime,
        force_case_one: p.force_case_one,
        ..TesterParams::default()
    }
}

pub fn build_strategy<'a>(spec: &AdversarySpec, params: &TesterParams) -> Result<Box<dyn AdversaryStrategy + 'a>> {
    match spec.strategy {
        StrategyId::Null => Ok(adversary_null()),
        StrategyId::PairEraser => Ok(adversary_pair_eraser()),
        StrategyId::SubsetEraser => adversary_subset_eraser(params.batch_size() as usize),
    }
}

fn adversary_label(spec: &AdversarySpec) -> String {
    let kind = match spec.kind {
        ManipulationKind::Erasure => "erasure",
        ManipulationKind::Corruption => "corruption",
    };
    let rate = match spec.rate {
        crate::oracle::RateMode::FixedRate => "fixed_rate",
        crate::oracle::RateMode::BudgetManaging => "budget_managing",
    };
    format!("{}({kind};{rate};t={})", spec.strategy.name(), spec.t)
}

/// Per-trial counters, summed across trials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub trials: u64,
    pub accepts: u64,
    pub queries: u64,
    pub max_queries: u64,
    pub iterations: u64,
    pub erased_iterations: u64,
    pub hit_trials: u64,
    pub hits: u64,
    /// Real testers: trials whose query count differs from the closed form.
    pub count_mismatches: u64,
    /// Rejections whose witness does not re-validate.
    pub invalid_witnesses: u64,
    pub online_trials: u64,
    pub sample_trials: u64,
}

impl Tally {
    pub fn merge(self, o: Self) -> Self {
        Self {
            trials: self.trials + o.trials,
            accepts: self.accepts + o.accepts,
            queries: self.queries + o.queries,
            max_queries: self.max_queries.max(o.max_queries),
            iterations: self.iterations + o.iterations,
            erased_iterations: self.erased_iterations + o.erased_iterations,
            hit_trials: self.hit_trials + o.hit_trials,
            hits: self.hits + o.hits,
            count_mismatches: self.count_mismatches + o.count_mismatches,
            invalid_witnesses: self.invalid_witnesses + o.invalid_witnesses,
            online_trials: self.online_trials + o.online_trials,
            sample_trials: self.sample_trials + o.sample_trials,
        }
    }
}

/// One Boolean trial with the session seeded from `(seed, trial)`.
pub fn bool_trial(
    f: &dyn BoolFunction,
    id: TesterId,
    adversary: &AdversarySpec,
    params: &TesterParams,
    k: u32,
    seed: u64,
    trial: u64,
) -> Result<Tally> {
    let config = AdversaryConfig::new(adversary.kind, adversary.rate, adversary.t)?;
    let strategy = build_strategy(adversary, params)?;
    let mut session = OracleSession::with_rng(f, config, strategy, trial_rng(seed, trial, Stream::Session));
    let out = run_tester(id, &mut session, params, k)?;
    let hits = session.manipulated_hits();
    Ok(Tally {
        trials: 1,
        accepts: u64::from(out.accepted()),
        queries: out.queries_used,
        max_queries: out.queries_used,
        iterations: out.iterations,
        erased_iterations: out.erased_iterations,
        hit_trials: u64::from(hits > 0),
        hits,
        invalid_witnesses: u64::from(out.witness.as_ref().is_some_and(|w| !w.is_consistent())),
        online_trials: u64::from(out.branch == Branch::Online),
        sample_trials: u64::from(out.branch == Branch::Sample),
        ..Tally::default()
    })
}

fn real_tally(out: &RealTestOutcome, expected_queries: Option<u64>, witness_ok: bool) -> Tally {
    Tally {
        trials: 1,
        accepts: u64::from(out.accepted()),
        queries: out.queries_used,
        max_queries: out.queries_used,
        iterations: out.comparison_iterations as u64,
        count_mismatches: u64::from(expected_queries.is_some_and(|q| q != out.queries_used)),
        invalid_witnesses: u64::from(!witness_ok),
        ..Tally::default()
    }
}

/// Upper bound on the queries of a characterization-phase rejection.
fn characterization_ceiling(out: &RealTestOutcome, per_round: u64) -> u64 {
    out.characterization_rounds as u64 * per_round
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<TrialReport> {
    cfg.validate()?;
    let instance = build_instance(&cfg.instance)?;
    let p = &cfg.params;
    let mut bounds = Vec::new();
    let tally = match (&instance, cfg.tester.f2()) {
        (BuiltInstance::Bool { f, facts, .. }, Some(id)) => {
            let params = tester_params(cfg, f.dim());
            params.validate()?;
            if id == TesterId::Auto {
                params.check_admissible()?;
            }
            let f = f.as_ref();
            let tally = parallel_trials(
                cfg.trials,
                |trial| bool_trial(f, id, &cfg.adversary, &params, p.k, cfg.seed, trial),
                Tally::merge,
            )?;
            bool_bounds(&mut bounds, cfg, &params, facts, &tally);
            tally
        }
        (BuiltInstance::Real { f, dist, .. }, None) if cfg.tester == ExperimentTester::RealAdditivity => {
            let rc = AdditivityConfig {
                n6: p.n6,
                tol: p.tolerance(),
                n5: p.comparisons,
            };
            let tally = parallel_trials(
                cfg.trials,
                |trial| {
                    let out = additivity_trial(f, dist, p.eps, &rc, cfg.seed, trial)?;
                    let expected = match out.phase {
                        Phase::Comparison => Some(rc.accepting_query_count(out.comparison_iterations)),
                        Phase::Characterization => None,
                    };
                    let mut t = real_tally(&out, expected, out.witness.as_ref().is_none_or(|w| w.revalidates(f, rc.tol)));
                    if out.phase == Phase::Characterization
                        && out.queries_used > characterization_ceiling(&out, crate::real::additivity::QUERIES_PER_CHARACTERIZATION_ROUND)
                    {
                        t.count_mismatches += 1;
                    }
                    Ok(t)
                },
                Tally::merge,
            )?;
            real_bounds(&mut bounds, cfg, f.is_additive(), &tally);
            tally
        }
        (BuiltInstance::Real { f, dist, .. }, None) => {
            let lc = LowDegreeConfig {
                n8: p.n8,
                n7: p.comparisons,
                tol: p.tolerance(),
            };
            let d = p.d;
            let tally = parallel_trials(
                cfg.trials,
                |trial| {
                    let out = low_degree_trial(f, d, dist, p.eps, &lc, cfg.seed, trial)?;
                    let expected = match out.phase {
                        Phase::Comparison => {
                            Some(lc.passing_query_count(d, out.comparison_iterations, out.in_ball_comparisons))
                        }
                        Phase::Characterization => None,
                    };
                    let mut t = real_tally(&out, expected, out.witness.as_ref().is_none_or(|w| w.revalidates(f, lc.tol)));
                    if out.phase == Phase::Characterization
                        && out.queries_used
                            > characterization_ceiling(&out, crate::low_degree::characterization_queries_per_round(d))
                    {
                        t.count_mismatches += 1;
                    }
                    Ok(t)
                },
                Tally::merge,
            )?;
            real_bounds(&mut bounds, cfg, f.degree().is_some_and(|deg| deg <= d), &tally);
            tally
        }
        _ => return Err(Error::Config(format!("tester {} does not match the instance", cfg.tester))),
    };

    let accept = Proportion::new(tally.accepts, tally.trials);
    Ok(TrialReport {
        tester: cfg.tester.name().to_string(),
        instance: instance.label().to_string(),
        adversary: adversary_label(&cfg.adversary),
        trials: tally.trials,
        seed: cfg.seed,
        accepts: tally.accepts,
        rejects: tally.trials - tally.accepts,
        accept_rate: accept.rate(),
        accept_ci: accept.wilson95(),
        mean_queries: tally.queries as f64 / tally.trials as f64,
        max_queries: tally.max_queries,
        iterations: tally.iterations,
        erased_iterations: tally.erased_iterations,
        trials_with_manipulated_hits: tally.hit_trials,
        manipulated_hits: tally.hits,
        demonstrative: false,
        bounds,
    }
    .normalized())
}

/// Sample count of the sample-based tester: `n + 7 + ⌈3/ε⌉`.
pub fn sample_tester_queries(params: &TesterParams) -> u64 {
    u64::from(params.sample_count()) + u64::from(params.comparison_count())
}

fn bool_bounds(bounds: &mut Vec<BoundCheck>, cfg: &ExperimentConfig, params: &TesterParams, facts: &InstanceFacts, t: &Tally) {
    let accept = Proportion::new(t.accepts, t.trials);
    let manipulates = cfg.adversary.strategy != StrategyId::Null && cfg.adversary.t > 0.0;
    if facts.linear && (!manipulates || cfg.adversary.kind == ManipulationKind::Erasure) {
        bounds.push(BoundCheck::proportion("one-sided: linear input always accepted", Relation::Equals, 1.0, accept, Rule::Exact));
    }
    let resilient = matches!(cfg.tester, ExperimentTester::Online | ExperimentTester::Sample | ExperimentTester::Auto);
    if let Some(d) = facts.distance {
        if !facts.linear && d >= params.eps && (resilient || !manipulates) {
            bounds.push(BoundCheck::proportion(
                "soundness: reject rate of an eps-far input",
                Relation::AtLeast,
                2.0 / 3.0,
                accept.complement(),
                Rule::Wilson { z: 2.0 },
            ));
        }
    }
    let erasing = manipulates && cfg.adversary.kind == ManipulationKind::Erasure;
    if erasing && t.online_trials == t.trials && t.iterations > 0 {
        bounds.push(BoundCheck::proportion(
            "erasure exposure per batch iteration",
            Relation::AtMost,
            3.0 / 64.0,
            Proportion::new(t.erased_iterations, t.iterations),
            Rule::Wilson { z: 3.0 },
        ));
    }
    if manipulates && t.sample_trials == t.trials && params.case() == Case::Two {
        let q = sample_tester_queries(params) as f64;
        let bound = q * q * cfg.adversary.t / f64::from(params.n).exp2();
        if bound < 1.0 {
            bounds.push(BoundCheck::proportion(
                "sample-based resilience: trials touching a manipulated cell",
                Relation::AtMost,
                bound,
                Proportion::new(t.hit_trials, t.trials),
                Rule::Wilson { z: 2.0 },
            ));
        }
    }
    if t.invalid_witnesses > 0 || accept.rate() < 1.0 {
        bounds.push(BoundCheck::exact("every rejection carries a consistent witness", Relation::Equals, 0.0, t.invalid_witnesses as f64));
    }
}

fn real_bounds(bounds: &mut Vec<BoundCheck>, cfg: &ExperimentConfig, has_property: bool, t: &Tally) {
    let accept = Proportion::new(t.accepts, t.trials);
    if has_property {
        bounds.push(BoundCheck::proportion("one-sided: input with the property always accepted", Relation::Equals, 1.0, accept, Rule::Exact));
    }
    if cfg.params.expect_far {
        bounds.push(BoundCheck::proportion(
            "soundness: reject rate of an eps-far input",
            Relation::AtLeast,
            2.0 / 3.0,
            accept.complement(),
            Rule::Wilson { z: 2.0 },
        ));
    }
    bounds.push(BoundCheck::exact("query count matches the loop arithmetic", Relation::Equals, 0.0, t.count_mismatches as f64));
    bounds.push(BoundCheck::exact("every rejection carries a valid witness", Relation::Equals, 0.0, t.invalid_witnesses as f64));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{ExperimentParams, ReportFormat};
    use crate::harness::report::emit_report;
    use crate::oracle::RateMode;

    fn base(tester: ExperimentTester, instance: InstanceSpec) -> ExperimentConfig {
        ExperimentConfig {
            tester,
            trials: 200,
            seed: 17,
            instance,
            adversary: AdversarySpec::default(),
            params: ExperimentParams::default(),
            output: None,
            format: ReportFormat::Json,
        }
    }

    #[test]
    fn replay_is_byte_identical() {
        let mut cfg = base(ExperimentTester::Blr3, InstanceSpec::Far { n: 10, eps: 0.1, seed: 2 });
        cfg.adversary = AdversarySpec {
            strategy: StrategyId::PairEraser,
            kind: ManipulationKind::Erasure,
            rate: RateMode::FixedRate,
            t: 3.0,
        };
        let a = emit_report(&run_experiment(&cfg).unwrap(), ReportFormat::Json).unwrap();
        let b = emit_report(&run_experiment(&cfg).unwrap(), ReportFormat::Json).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_trials_is_an_error() {
        let mut cfg = base(ExperimentTester::Auto, InstanceSpec::Linear { n: 16, seed: 0 });
        cfg.trials = 0;
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn online_tester_on_linear_input_is_one_sided() {
        let mut cfg = base(ExperimentTester::Online, InstanceSpec::Linear { n: 300, seed: 0 });
        cfg.params.eps = 0.5;
        cfg.adversary = AdversarySpec {
            strategy: StrategyId::SubsetEraser,
            kind: ManipulationKind::Erasure,
            rate: RateMode::BudgetManaging,
            t: 16.0,
        };
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.accepts, r.trials);
        assert!(r.bounds.iter().any(|b| b.name.starts_with("one-sided") && b.passed));
        assert!(r.bounds.iter().any(|b| b.name.starts_with("erasure exposure")));
        assert!(r.all_passed(), "{:#?}", r.bounds);
    }

    #[test]
    fn real_additivity_experiment() {
        let mut cfg = base(
            ExperimentTester::RealAdditivity,
            InstanceSpec::Real {
                function: crate::harness::config::FunctionSpec::Text("additive(1,-2)".into()),
                distribution: crate::harness::config::DistributionSpec::Text("gaussian(2)".into()),
            },
        );
        cfg.trials = 50;
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.accept_rate, 1.0);
        assert_eq!(r.mean_queries, 7.0 * 20.0 + 3.0 * 40.0);
        assert!(r.all_passed());
    }

    #[test]
    fn exact_far_instances() {
        let (_, d) = exact_far_function(16, 0.05, 0).unwrap();
        assert_eq!(d, Dyadic::new(3277, 16));
        let (_, d) = exact_far_function(16, 0.25, 0).unwrap();
        assert_eq!(d, Dyadic::new(1, 2));
        assert!(exact_far_function(16, 0.3, 0).is_err());
    }
}
