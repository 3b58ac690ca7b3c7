use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sparsecut::backend::{backend_from_name, ConicBackend, SolveLimits};
use sparsecut::bench::{
    bnb_csv, bnb_instance, compare_csv, compare_instance, load_instance, report, trace_svg,
    BnbConfig, ExperimentConfig, InstanceSource,
};
use sparsecut::bnb::BnbOptions;
use sparsecut::cutplane::{
    compute_reference, run_cutting_plane, ConeMode, DriverOptions, Limits, StrategyKind,
};
use sparsecut::instances::{generate_boxqcqp, write_json, GeneratorConfig};
use sparsecut::model::QcqpInstance;
use sparsecut::relax::{build_shor_sdp, McCormickMode, ShorOptions};
use sparsecut::separation::write_cut_pool;
use sparsecut::Error;

#[derive(Parser)]
#[command(
    name = "sparsecut",
    version,
    about = "Sparse PSD cutting planes for box-constrained QCQPs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random sparse BoxQCQP instance as JSON.
    Generate(GenerateArgs),
    /// Solve the Shor SDP (or DNN) relaxation of an instance.
    SolveSdp(SolveSdpArgs),
    /// Run one cutting-plane strategy and write its per-iteration trace.
    CutLoop(CutLoopArgs),
    /// Run all four strategies on each instance and write one CSV row per strategy.
    Compare(CompareArgs),
    /// Solve instances globally with and/or without sparse cuts.
    Bnb(BnbArgs),
    /// Average compare CSVs per strategy.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    /// Density of the off-diagonal objective support.
    #[arg(long)]
    rho: f64,
    /// Number of quadratic constraints.
    #[arg(long, default_value_t = 0)]
    qc: usize,
    /// Instance index; the random stream is derived from (n, rho, qc, seed).
    #[arg(long, default_value_t = 0)]
    seed: u32,
    /// Fraction of support entries present in each constraint.
    #[arg(long, default_value_t = 1.0)]
    constraint_density: f64,
    /// Output directory, or a file path ending in `.json`.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConeArg {
    Epsd,
    Ednn,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum McCormickArg {
    Off,
    #[value(name = "E", alias = "e")]
    E,
    Full,
}

impl From<McCormickArg> for McCormickMode {
    fn from(m: McCormickArg) -> Self {
        match m {
            McCormickArg::Off => McCormickMode::Off,
            McCormickArg::E => McCormickMode::Support,
            McCormickArg::Full => McCormickMode::Full,
        }
    }
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value = "clarabel")]
    backend: String,
    #[arg(long, value_enum, default_value = "epsd")]
    cone: ConeArg,
    /// McCormick pattern (default: full for DenseMcCPlusCuts, E otherwise).
    #[arg(long, value_enum)]
    mccormick: Option<McCormickArg>,
}

#[derive(Args, Clone)]
struct LoopArgs {
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0.99)]
    gc_target: f64,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    #[arg(long, default_value_t = 0.001)]
    alpha: f64,
}

impl LoopArgs {
    fn limits(&self) -> Limits {
        Limits {
            time: self.time_limit,
            max_iters: self.max_iters,
            gc_target: self.gc_target,
        }
    }
}

#[derive(Args)]
struct SolveSdpArgs {
    instance: PathBuf,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CutLoopArgs {
    instance: PathBuf,
    #[arg(long, default_value = "SparseCuts")]
    strategy: String,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    limits: LoopArgs,
    /// Trace CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the generated cuts as a JSON cut pool.
    #[arg(long)]
    cuts_out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Instance files (`.json` or `.qplib`) or directories of them.
    #[arg(required = true)]
    instances: Vec<PathBuf>,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    limits: LoopArgs,
    /// CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Bound-progression chart of the first instance.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct BnbArgs {
    #[arg(required = true)]
    instances: Vec<PathBuf>,
    /// Only the run with sparse cuts.
    #[arg(long, conflicts_with = "no_cuts")]
    with_cuts: bool,
    /// Only the run without cuts.
    #[arg(long)]
    no_cuts: bool,
    #[arg(long, default_value_t = 1e-4)]
    eps_rel: f64,
    #[arg(long, default_value_t = 100_000)]
    node_limit: usize,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    limits: LoopArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(required = true)]
    csv: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    User(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::User(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::User(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Generate(a) => generate(a),
        Command::SolveSdp(a) => solve_sdp(a),
        Command::CutLoop(a) => cut_loop(a),
        Command::Compare(a) => compare(a),
        Command::Bnb(a) => bnb(a),
        Command::Report(a) => run_report(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::User(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `sparsecut --help` for usage");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn backend(common: &Common) -> Result<Arc<dyn ConicBackend>, Failure> {
    Ok(backend_from_name(&common.backend)?)
}

/// Cone mode for the driver; an explicit `ednn` on a signed instance is an error.
fn cone_mode(cone: ConeArg, instance: &QcqpInstance) -> Result<ConeMode, Failure> {
    match cone {
        ConeArg::Epsd => Ok(ConeMode::Epsd),
        ConeArg::Auto => Ok(ConeMode::EdnnIfNonneg),
        ConeArg::Ednn if instance.nonneg() => Ok(ConeMode::EdnnIfNonneg),
        ConeArg::Ednn => Err(Error::ModeViolation.into()),
    }
}

fn generate(a: GenerateArgs) -> CliResult {
    let mut cfg = GeneratorConfig::new(a.n, a.rho, a.qc, a.seed);
    cfg.constraint_density = a.constraint_density;
    let instance = generate_boxqcqp(&cfg)?;
    let path = if a.out.extension().is_some_and(|e| e == "json") {
        a.out
    } else {
        a.out.join(format!("{}.json", cfg.name()))
    };
    emit(Some(&path), &write_json(&instance))?;
    println!("{}", path.display());
    Ok(())
}

fn solve_sdp(a: SolveSdpArgs) -> CliResult {
    let instance = load_instance(&a.instance)?;
    let backend = backend(&a.common)?;
    let dnn = cone_mode(a.common.cone, &instance)? == ConeMode::EdnnIfNonneg && instance.nonneg();
    let mccormick = a
        .common
        .mccormick
        .map(McCormickMode::from)
        .unwrap_or_default();
    let problem = build_shor_sdp(&instance, ShorOptions { mccormick, dnn });
    let result = backend.solve(&problem, &SolveLimits::default());
    let z = result.optimal_value()?;
    let json = serde_json::json!({
        "instance": instance.name(),
        "relaxation": if dnn { "DNN" } else { "SDP" },
        "mccormick": format!("{mccormick:?}"),
        "bound": z,
        "status": result.status.as_str(),
        "time": result.solve_time,
    });
    let text = serde_json::to_string_pretty(&json).map_err(Error::from)? + "\n";
    emit(a.out.as_deref(), &text)
}

fn experiment(
    common: &Common,
    limits: &LoopArgs,
    source: InstanceSource,
    cone: ConeMode,
) -> ExperimentConfig {
    let mut config = ExperimentConfig::new(source, ".");
    config.limits = limits.limits();
    config.cone = cone;
    config.alpha = limits.alpha;
    config.mccormick = common.mccormick.map(McCormickMode::from);
    config
}

fn cut_loop(a: CutLoopArgs) -> CliResult {
    let instance = load_instance(&a.instance)?;
    let backend = backend(&a.common)?;
    let kind: StrategyKind = a.strategy.parse()?;
    let cone = cone_mode(a.common.cone, &instance)?;
    let config = experiment(
        &a.common,
        &a.limits,
        InstanceSource::File(a.instance.clone()),
        cone,
    );
    config.validate()?;
    let reference = compute_reference(&instance, backend.as_ref(), cone == ConeMode::EdnnIfNonneg)?;
    let trace = run_cutting_plane(
        &instance,
        &config.strategy(kind),
        &config.limits,
        &reference,
        backend.as_ref(),
        &DriverOptions::default(),
    )?;
    emit(a.out.as_deref(), &trace.to_csv()?)?;
    if let Some(path) = &a.cuts_out {
        emit(Some(path), &write_cut_pool(&trace.cuts)?)?;
    }
    eprintln!(
        "{} {}: {} after {} iterations, {} cuts, GC {}",
        instance.name(),
        kind,
        trace.summary.termination.as_str(),
        trace.iterations(),
        trace.num_cuts(),
        trace
            .summary
            .final_gc
            .map(|g| format!("{g:.4}"))
            .unwrap_or_else(|| "n/a".into())
    );
    Ok(())
}

fn collect_instances(paths: &[PathBuf]) -> Result<Vec<QcqpInstance>, Failure> {
    let mut out = Vec::new();
    for p in paths {
        let source = if p.is_dir() {
            InstanceSource::Directory(p.clone())
        } else {
            InstanceSource::File(p.clone())
        };
        out.extend(ExperimentConfig::new(source, ".").load_instances()?);
    }
    Ok(out)
}

fn compare(a: CompareArgs) -> CliResult {
    let instances = collect_instances(&a.instances)?;
    let backend = backend(&a.common)?;
    let mut outcomes = Vec::new();
    for instance in &instances {
        let cone = cone_mode(a.common.cone, instance)?;
        let config = experiment(
            &a.common,
            &a.limits,
            InstanceSource::File(PathBuf::new()),
            cone,
        );
        log::info!("comparing strategies on {}", instance.name());
        outcomes.push(compare_instance(instance, &config, backend.as_ref())?);
    }
    emit(a.out.as_deref(), &compare_csv(&outcomes)?)?;
    if let (Some(path), Some(first)) = (&a.svg, outcomes.first()) {
        emit(Some(path), &trace_svg(&first.instance, &first.traces))?;
    }
    Ok(())
}

fn bnb(a: BnbArgs) -> CliResult {
    let instances = collect_instances(&a.instances)?;
    let backend = backend(&a.common)?;
    let configs: Vec<BnbConfig> = match (a.with_cuts, a.no_cuts) {
        (true, _) => vec![BnbConfig::WithCuts],
        (_, true) => vec![BnbConfig::NoCuts],
        _ => vec![BnbConfig::NoCuts, BnbConfig::WithCuts],
    };
    let mut options = BnbOptions {
        eps_rel: a.eps_rel,
        node_limit: a.node_limit,
        ..BnbOptions::default()
    };
    if let Some(m) = a.common.mccormick {
        options.mccormick = m.into();
    }
    let mut outcomes = Vec::new();
    for instance in &instances {
        let cone = cone_mode(a.common.cone, instance)?;
        let config = experiment(
            &a.common,
            &a.limits,
            InstanceSource::File(PathBuf::new()),
            cone,
        );
        log::info!("global solve of {}", instance.name());
        outcomes.push(bnb_instance(
            instance,
            &configs,
            &config,
            &options,
            backend.as_ref(),
        )?);
    }
    emit(a.out.as_deref(), &bnb_csv(&outcomes)?)
}

fn run_report(a: ReportArgs) -> CliResult {
    let texts = a
        .csv
        .iter()
        .map(std::fs::read_to_string)
        .collect::<Result<Vec<_>, _>>()?;
    emit(a.out.as_deref(), &report(&texts)?)
}
