use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use linten::harness::{
    emit_report, impossibility_demo, run_experiment, AdversarySpec, DemoConfig, DistributionSpec, ExperimentConfig,
    ExperimentParams, ExperimentTester, FunctionSpec, InstanceSpec, ReportFormat, StrategyId,
};
use linten::oracle::{ManipulationKind, RateMode};
use linten::testers::TesterId;

#[derive(Parser)]
#[command(name = "linten", version, about = "Property testers under online oracle manipulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML or JSON config.
    Run { config: PathBuf },
    /// Demonstrations.
    #[command(subcommand)]
    Demo(Demo),
    ListTesters,
    ListAdversaries,
    Blr3(BoolArgs),
    Kpoint(BoolArgs),
    Online(BoolArgs),
    Sample(BoolArgs),
    Auto(BoolArgs),
    RealAdditivity(AdditivityArgs),
    LowDegree(LowDegreeArgs),
}

#[derive(Subcommand)]
enum Demo {
    /// Indistinguishability of a linear and a far function at a high manipulation rate.
    Impossibility {
        #[arg(long, default_value_t = 12)]
        n: u32,
        #[arg(long, default_value_t = 0.125)]
        eps: f64,
        #[arg(long, default_value_t = 4000)]
        trials: u64,
        #[arg(long, default_value_t = 2000)]
        profile_trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum InstanceKind {
    Linear,
    Far,
    AffineX1,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Erasure,
    Corruption,
}

#[derive(Clone, Copy, ValueEnum)]
enum RateArg {
    FixedRate,
    Budget,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "json")]
    format: ReportFormat,
}

#[derive(Args)]
struct BoolArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    #[arg(long, default_value = "null")]
    adversary: StrategyId,
    #[arg(long, value_enum, default_value = "erasure")]
    kind: KindArg,
    #[arg(long, value_enum, default_value = "budget")]
    rate: RateArg,
    /// Input function; ignored when --table is given.
    #[arg(long, value_enum, default_value = "far")]
    instance: InstanceKind,
    /// Truth table file in the `n=<int>` text format.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    instance_seed: u64,
    /// Points per round of the k-point tester.
    #[arg(long, default_value_t = 4)]
    k: u32,
    /// Skip the admissible-rate check of the dispatcher.
    #[arg(long)]
    no_regime_check: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct AdditivityArgs {
    #[arg(long = "fn")]
    function: String,
    #[arg(long)]
    dist: String,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long)]
    tol_abs: Option<f64>,
    #[arg(long)]
    tol_rel: Option<f64>,
    #[arg(long, default_value_t = 20)]
    n6: usize,
    /// Register a soundness check: the function is known to be eps-far.
    #[arg(long)]
    expect_far: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct LowDegreeArgs {
    #[arg(long)]
    d: u32,
    #[arg(long = "fn")]
    function: String,
    #[arg(long)]
    dist: String,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long)]
    n8: Option<usize>,
    #[arg(long)]
    expect_far: bool,
    #[command(flatten)]
    common: Common,
}

fn bool_config(tester: ExperimentTester, a: BoolArgs) -> ExperimentConfig {
    let instance = match (&a.table, a.instance) {
        (Some(path), _) => InstanceSpec::Table { path: path.clone() },
        (None, InstanceKind::Linear) => InstanceSpec::Linear {
            n: a.n,
            seed: a.instance_seed,
        },
        (None, InstanceKind::Far) => InstanceSpec::Far {
            n: a.n,
            eps: a.eps,
            seed: a.instance_seed,
        },
        (None, InstanceKind::AffineX1) => InstanceSpec::AffineX1 { n: a.n },
    };
    ExperimentConfig {
        tester,
        trials: a.common.trials,
        seed: a.common.seed,
        instance,
        adversary: AdversarySpec {
            strategy: a.adversary,
            kind: match a.kind {
                KindArg::Erasure => ManipulationKind::Erasure,
                KindArg::Corruption => ManipulationKind::Corruption,
            },
            rate: match a.rate {
                RateArg::FixedRate => RateMode::FixedRate,
                RateArg::Budget => RateMode::BudgetManaging,
            },
            t: a.t,
        },
        params: ExperimentParams {
            eps: a.eps,
            k: a.k,
            check_regime: !a.no_regime_check,
            ..ExperimentParams::default()
        },
        output: None,
        format: a.common.format,
    }
}

fn real_config(tester: ExperimentTester, function: String, dist: String, common: Common, params: ExperimentParams) -> ExperimentConfig {
    ExperimentConfig {
        tester,
        trials: common.trials,
        seed: common.seed,
        instance: InstanceSpec::Real {
            function: FunctionSpec::Text(function),
            distribution: DistributionSpec::Text(dist),
        },
        adversary: AdversarySpec::default(),
        params,
        output: None,
        format: common.format,
    }
}

fn run(cfg: &ExperimentConfig) -> linten::Result<bool> {
    let report = run_experiment(cfg)?;
    for b in &report.bounds {
        eprintln!("{}", b.line());
    }
    let bytes = emit_report(&report, cfg.format)?;
    match &cfg.output {
        Some(path) => std::fs::write(path, &bytes)?,
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    Ok(report.all_passed())
}

fn dispatch(cli: Cli) -> linten::Result<bool> {
    let cfg = match cli.command {
        Command::Run { config } => ExperimentConfig::load(&config)?,
        Command::Demo(Demo::Impossibility {
            n,
            eps,
            trials,
            profile_trials,
            seed,
        }) => {
            let cfg = DemoConfig {
                n,
                eps,
                tester: TesterId::Auto,
                trials,
                profile_trials,
                seed,
            };
            let report = impossibility_demo(&cfg)?;
            for b in &report.bounds {
                eprintln!("{}", b.line());
            }
            println!("{}", serde_json::to_string_pretty(&report).map_err(|e| linten::Error::Internal(e.to_string()))?);
            return Ok(report.all_passed());
        }
        Command::ListTesters => {
            for t in ExperimentTester::ALL {
                println!("{:<16} {}", t.name(), t.describe());
            }
            return Ok(true);
        }
        Command::ListAdversaries => {
            for s in StrategyId::ALL {
                println!("{:<16} {}", s.name(), s.describe());
            }
            return Ok(true);
        }
        Command::Blr3(a) => bool_config(ExperimentTester::Blr3, a),
        Command::Kpoint(a) => bool_config(ExperimentTester::Kpoint, a),
        Command::Online(a) => bool_config(ExperimentTester::Online, a),
        Command::Sample(a) => bool_config(ExperimentTester::Sample, a),
        Command::Auto(a) => bool_config(ExperimentTester::Auto, a),
        Command::RealAdditivity(a) => {
            let mut p = ExperimentParams {
                eps: a.eps,
                n6: a.n6,
                expect_far: a.expect_far,
                ..ExperimentParams::default()
            };
            p.tol_abs = a.tol_abs.unwrap_or(p.tol_abs);
            p.tol_rel = a.tol_rel.unwrap_or(p.tol_rel);
            real_config(ExperimentTester::RealAdditivity, a.function, a.dist, a.common, p)
        }
        Command::LowDegree(a) => {
            let p = ExperimentParams {
                eps: a.eps,
                d: a.d,
                n8: a.n8,
                expect_far: a.expect_far,
                ..ExperimentParams::default()
            };
            real_config(ExperimentTester::LowDegree, a.function, a.dist, a.common, p)
        }
    };
    run(&cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
