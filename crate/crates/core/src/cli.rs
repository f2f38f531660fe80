//! The `daernn` command line.
//!
//! Settings resolve as flags, then the `--config` TOML file, then built-in
//! defaults. `DAERNN_SEED` sets the default seed.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::censor::{censoring_rate, inject_censoring, BoundDist, BoundSampler, CensorType};
use crate::daernn::{AugmentConfig, SeedSchedule};
use crate::error::{Error, Result};
use crate::expectile::{reporting_levels, ExpectileLevel};
use crate::harness::{
    fit_method_keep, grid_search_cv, run_replications, tune_for_scenario, write_detail_csv, write_plot_csv,
    write_summary_csv, write_timing_csv, BenchmarkConfig, CvResult, HyperGrid, HyperParams, Method, MethodConfig,
};
use crate::io::{self, Dataset, ModelArchive, PredictionMeta};
use crate::nn::Activation;
use crate::simgen::{gen_scenario, CensorRate, ErrorLaw, Model, ScenarioSpec};

/// Hyperparameters used when neither flags nor a config file set them;
/// selected by 5-fold CV on Model 1, N(0,1), 25% right censoring.
pub const DEFAULT_HYPER: HyperParams =
    HyperParams { layers: 4, nodes: 64, learning_rate: 0.1, dropout: 0.1, epochs: 100, batch_size: 64 };

#[derive(Debug, Parser)]
#[command(name = "daernn", version, about = "Expectile regression neural networks for censored responses")]
pub struct Cli {
    /// TOML file with default settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a censored simulation dataset.
    Simulate(SimulateArgs),
    /// Censor the response column of a complete dataset.
    Inject(InjectArgs),
    /// Fit a method on training data and predict a test set.
    Fit(FitArgs),
    /// Predict with a saved model archive.
    Predict(PredictArgs),
    /// Run Monte-Carlo replications of a scenario.
    Benchmark(BenchmarkArgs),
    /// Cross-validated hyperparameter search on uncensored records.
    Tune(TuneArgs),
}

#[derive(Debug, Args, Default)]
pub struct ScenarioArgs {
    /// model1 or model2.
    #[arg(long)]
    pub model: Option<String>,
    /// normal or t3.
    #[arg(long)]
    pub error: Option<String>,
    /// right, left or interval.
    #[arg(long)]
    pub censor: Option<String>,
    /// 25 or 50.
    #[arg(long)]
    pub rate: Option<String>,
    #[arg(short = 'n', long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct SeedArg {
    #[arg(long, env = "DAERNN_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Default)]
pub struct HyperArgs {
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub dropout: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// relu or sigmoid.
    #[arg(long)]
    pub activation: Option<String>,
    /// JSON written by `tune`; its best point replaces the defaults.
    #[arg(long)]
    pub hyper_file: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct AugmentArgs {
    /// Imputation grid size m (default max(floor(sqrt(n)), 99)).
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// Augmentation iterations H.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Comma-separated reporting levels.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    #[arg(long)]
    pub warm_start: bool,
    /// per-iteration or shared.
    #[arg(long)]
    pub seed_schedule: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InjectArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// Name of the response column.
    #[arg(long, default_value = "y")]
    pub response: String,
    /// right, left or interval.
    #[arg(long)]
    pub kind: String,
    /// Lower-bound law, e.g. `normal:0.6:2`, `exp:2` or `const:-1`.
    #[arg(long)]
    pub lower: Option<String>,
    /// Upper-bound law.
    #[arg(long)]
    pub upper: Option<String>,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub train: PathBuf,
    /// Test covariates; extra columns are ignored.
    #[arg(long)]
    pub test: PathBuf,
    /// daernn, full, oracle or dalinear.
    #[arg(long)]
    pub method: Option<String>,
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[command(flatten)]
    pub augment: AugmentArgs,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Predictions CSV.
    #[arg(short, long)]
    pub out: PathBuf,
    /// Metadata sidecar (default: `<out>.meta.json`).
    #[arg(long)]
    pub meta: Option<PathBuf>,
    /// Per-iteration predictions CSV.
    #[arg(long)]
    pub detail: Option<PathBuf>,
    /// Model archive for `predict`.
    #[arg(long)]
    pub save_model: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    #[arg(short = 'r', long)]
    pub replications: Option<usize>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    /// Tune once on replication 1 before running.
    #[arg(long)]
    pub tune: bool,
    /// Write every test prediction to the plot file.
    #[arg(long)]
    pub keep_predictions: bool,
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[command(flatten)]
    pub augment: AugmentArgs,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    /// Observation CSV; without it the scenario flags generate data.
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// relu or sigmoid.
    #[arg(long)]
    pub activation: Option<String>,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub method: Option<String>,
    pub methods: Option<Vec<String>>,
    #[serde(default)]
    pub scenario: FileScenario,
    #[serde(default)]
    pub hyper: FileHyper,
    #[serde(default)]
    pub daernn: FileDaernn,
    pub grid: Option<HyperGrid>,
    #[serde(default)]
    pub benchmark: FileBenchmark,
    #[serde(default)]
    pub tune: FileTune,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileScenario {
    pub model: Option<String>,
    pub error: Option<String>,
    pub censor: Option<String>,
    pub rate: Option<u32>,
    pub n: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileHyper {
    pub layers: Option<usize>,
    pub nodes: Option<usize>,
    pub learning_rate: Option<f64>,
    pub dropout: Option<f64>,
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub activation: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileDaernn {
    pub grid_size: Option<usize>,
    pub iterations: Option<usize>,
    pub levels: Option<Vec<f64>>,
    pub warm_start: Option<bool>,
    pub seed_schedule: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileBenchmark {
    pub replications: Option<usize>,
    pub train_fraction: Option<f64>,
    pub keep_predictions: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileTune {
    pub folds: Option<usize>,
    pub tau: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message())))
    }
}

/// Exit status for an error: 2 config, 3 schema, 4 numerical, 5 I/O, 1 other.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Domain(_) => 2,
        Error::Schema(_) | Error::Json(_) => 3,
        Error::Csv(e) if e.is_io_error() => 5,
        Error::Csv(_) => 3,
        Error::Io(_) => 5,
        e if e.is_numerical() => 4,
        _ => 1,
    }
}

fn parse<T: FromStr<Err = Error>>(value: &str) -> Result<T> {
    value.parse()
}

fn scenario(args: &ScenarioArgs, file: &FileScenario, seed: u64) -> Result<ScenarioSpec> {
    let model = args.model.as_deref().or(file.model.as_deref()).unwrap_or("model1");
    let error = args.error.as_deref().or(file.error.as_deref()).unwrap_or("normal");
    let censor = args.censor.as_deref().or(file.censor.as_deref()).unwrap_or("right");
    let rate = match (&args.rate, file.rate) {
        (Some(r), _) => r.clone(),
        (None, Some(r)) => r.to_string(),
        (None, None) => "25".into(),
    };
    let spec = ScenarioSpec {
        model: parse::<Model>(model)?,
        error: parse::<ErrorLaw>(error)?,
        censor_kind: parse::<CensorType>(censor)?,
        rate: parse::<CensorRate>(&rate)?,
        n: args.n.or(file.n).unwrap_or(1000),
        seed,
    };
    if spec.n == 0 {
        return Err(Error::Config("n must be positive".into()));
    }
    spec.sampler()?;
    Ok(spec)
}

fn activation(flag: Option<&str>, file: Option<&str>) -> Result<Activation> {
    match flag.or(file).unwrap_or("relu") {
        "relu" => Ok(Activation::Relu),
        "sigmoid" => Ok(Activation::Sigmoid),
        other => Err(Error::Config(format!("unknown activation `{other}` (expected relu or sigmoid)"))),
    }
}

fn hyper(args: &HyperArgs, file: &FileHyper) -> Result<(HyperParams, Activation)> {
    let base = match &args.hyper_file {
        Some(p) => io::read_json::<_, CvResult>(BufReader::new(File::open(p)?))?.best,
        None => DEFAULT_HYPER,
    };
    let h = HyperParams {
        layers: args.layers.or(file.layers).unwrap_or(base.layers),
        nodes: args.nodes.or(file.nodes).unwrap_or(base.nodes),
        learning_rate: args.learning_rate.or(file.learning_rate).unwrap_or(base.learning_rate),
        dropout: args.dropout.or(file.dropout).unwrap_or(base.dropout),
        epochs: args.epochs.or(file.epochs).unwrap_or(base.epochs),
        batch_size: args.batch_size.or(file.batch_size).unwrap_or(base.batch_size),
    };
    let act = activation(args.activation.as_deref(), file.activation.as_deref())?;
    h.spec(1, act).map_err(|e| Error::Config(e.to_string()))?;
    h.train(0).validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok((h, act))
}

fn augment(args: &AugmentArgs, file: &FileDaernn, seed: u64) -> Result<AugmentConfig> {
    let target_levels = match args.levels.as_ref().or(file.levels.as_ref()) {
        Some(levels) => levels
            .iter()
            .map(|&t| ExpectileLevel::new(t).map_err(|e| Error::Config(e.to_string())))
            .collect::<Result<Vec<_>>>()?,
        None => reporting_levels(),
    };
    let seed_schedule = match args.seed_schedule.as_deref().or(file.seed_schedule.as_deref()) {
        None | Some("per-iteration") | Some("periteration") => SeedSchedule::PerIteration,
        Some("shared") => SeedSchedule::Shared,
        Some(other) => {
            return Err(Error::Config(format!("unknown seed schedule `{other}` (expected per-iteration or shared)")))
        }
    };
    let cfg = AugmentConfig {
        grid_size: args.grid_size.or(file.grid_size),
        iterations: args.iterations.or(file.iterations).unwrap_or(5),
        target_levels,
        seed,
        warm_start: args.warm_start || file.warm_start.unwrap_or(false),
        seed_schedule,
    };
    cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

#[derive(Debug, Serialize)]
struct SimulationMeta {
    scenario: String,
    spec: ScenarioSpec,
    sampler: BoundSampler,
    exponential_parameterization: &'static str,
    censoring_rate: f64,
}

fn cmd_simulate(args: &SimulateArgs, file: &FileConfig, seed: u64) -> Result<()> {
    let spec = scenario(&args.scenario, &file.scenario, seed)?;
    let observations = gen_scenario(&spec)?;
    let rate = censoring_rate(&observations);
    let data = Dataset { covariates: vec!["x1".into(), "x2".into()], observations };
    let mut w = create(&args.out)?;
    io::write_observations(&data, &mut w)?;
    w.flush()?;
    let meta = SimulationMeta {
        scenario: spec.id(),
        spec,
        sampler: spec.sampler()?,
        exponential_parameterization: "mean",
        censoring_rate: rate,
    };
    io::write_json(&meta, create(&sidecar(&args.out))?)?;
    println!("censoring rate: {}", io::fmt_num(rate));
    Ok(())
}

fn cmd_inject(args: &InjectArgs, seed: u64) -> Result<()> {
    let (covariates, rows) = io::read_response_table(open(&args.input)?, &args.response)?;
    let dist = |s: &Option<String>| s.as_deref().map(parse::<BoundDist>).transpose();
    let sampler = BoundSampler::build(parse::<CensorType>(&args.kind)?, dist(&args.lower)?, dist(&args.upper)?)?;
    let injected = inject_censoring(&rows, &sampler, seed)?;
    let data = Dataset { covariates, observations: injected.observations };
    let mut w = create(&args.out)?;
    io::write_observations(&data, &mut w)?;
    w.flush()?;
    println!("censoring rate: {}", io::fmt_num(injected.achieved_rate));
    Ok(())
}

fn method_config(hyper_args: &HyperArgs, aug_args: &AugmentArgs, file: &FileConfig, seed: u64) -> Result<MethodConfig> {
    let (hyper, activation) = hyper(hyper_args, &file.hyper)?;
    Ok(MethodConfig { hyper, activation, augment: augment(aug_args, &file.daernn, seed)? })
}

fn cmd_fit(args: &FitArgs, file: &FileConfig, seed: u64) -> Result<()> {
    let method = parse::<Method>(args.method.as_deref().or(file.method.as_deref()).unwrap_or("daernn"))?;
    let config = method_config(&args.hyper, &args.augment, file, seed)?;
    let train = io::read_observations(open(&args.train)?)?;
    let test_x = io::read_covariates(open(&args.test)?, &train.covariates)?;
    let (fit, models) = fit_method_keep(method, &train.observations, &test_x, &config)?;
    let mut w = create(&args.out)?;
    io::write_predictions(&fit.mapping, &fit.predictions, &mut w)?;
    w.flush()?;
    let meta = PredictionMeta {
        method,
        grid_size: config.augment.grid(train.observations.len())?.m(),
        iterations: if fit.per_iteration.is_empty() { 1 } else { fit.per_iteration.len() },
        hyper: config.hyper,
        activation: config.activation,
        seed,
        seed_schedule: config.augment.seed_schedule,
        warm_start: config.augment.warm_start,
        mapping: fit.mapping.clone(),
        covariates: train.covariates.clone(),
        n_train: train.observations.len(),
        n_test: test_x.len(),
        augmentation: fit.augmentation.clone(),
    };
    io::write_json(&meta, create(&args.meta.clone().unwrap_or_else(|| sidecar(&args.out)))?)?;
    if let Some(path) = &args.detail {
        let per_iteration = if fit.per_iteration.is_empty() { vec![fit.predictions.clone()] } else { fit.per_iteration };
        let mut w = create(path)?;
        io::write_iteration_detail(&fit.mapping, &per_iteration, &mut w)?;
        w.flush()?;
    }
    if let Some(path) = &args.save_model {
        let archive = ModelArchive::new(method, train.covariates, fit.mapping, &models);
        io::write_json(&archive, create(path)?)?;
    }
    Ok(())
}

fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let archive: ModelArchive = io::read_json(open(&args.model)?)?;
    let xs = io::read_covariates(open(&args.input)?, &archive.covariates)?;
    let predictions = archive.fitted()?.predict(&xs)?;
    let mut w = create(&args.out)?;
    io::write_predictions(&archive.mapping, &predictions, &mut w)?;
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct TuningRecord<'a> {
    seconds: f64,
    #[serde(flatten)]
    result: &'a CvResult,
}

fn cmd_benchmark(args: &BenchmarkArgs, file: &FileConfig, seed: u64) -> Result<()> {
    let methods = match args.methods.as_ref().or(file.methods.as_ref()) {
        Some(list) => list.iter().map(|m| parse::<Method>(m)).collect::<Result<Vec<_>>>()?,
        None => vec![Method::Daernn, Method::Full],
    };
    let mut config = BenchmarkConfig {
        scenario: scenario(&args.scenario, &file.scenario, seed)?,
        methods,
        replications: args.replications.or(file.benchmark.replications).unwrap_or(20),
        method: method_config(&args.hyper, &args.augment, file, seed)?,
        train_fraction: args.train_fraction.or(file.benchmark.train_fraction).unwrap_or(0.8),
        keep_predictions: args.keep_predictions || file.benchmark.keep_predictions.unwrap_or(false),
    };
    config.validate()?;
    std::fs::create_dir_all(&args.out_dir)?;
    if args.tune {
        let grid = file.grid.clone().unwrap_or_default();
        let tau = ExpectileLevel::new(file.tune.tau.unwrap_or(0.5)).map_err(|e| Error::Config(e.to_string()))?;
        let start = Instant::now();
        let result = tune_for_scenario(&config, &grid, file.tune.folds.unwrap_or(5), tau)?;
        let seconds = start.elapsed().as_secs_f64();
        eprintln!("tuned in {seconds:.1} s: {:?}", result.best);
        config.method.hyper = result.best;
        io::write_json(&TuningRecord { seconds, result: &result }, create(&args.out_dir.join("tuning.json"))?)?;
    }
    let summary = run_replications(&config)?;
    let write = |name: &str, f: &dyn Fn(&mut BufWriter<File>) -> Result<()>| -> Result<()> {
        let mut w = create(&args.out_dir.join(name))?;
        f(&mut w)?;
        w.flush()?;
        Ok(())
    };
    write("summary.csv", &|w| write_summary_csv(&summary, w))?;
    write("detail.csv", &|w| write_detail_csv(&summary, w))?;
    write("plot.csv", &|w| write_plot_csv(&summary, w))?;
    write("timing.csv", &|w| write_timing_csv(&summary, w))?;
    println!("scenario {} ({} replications)", summary.scenario, summary.replications);
    for row in &summary.rows {
        let show = |v: Option<f64>| v.map_or("-".into(), |v| format!("{v:.4}"));
        println!(
            "{:>9} tau={:<4} EL={} ratio={} failures={}",
            row.method.name(),
            row.tau,
            show(row.mean_el),
            show(row.mean_ratio),
            row.failures
        );
    }
    for t in &summary.timing {
        println!("{:>9} mean fit time {:.2} s", t.method.name(), t.mean_seconds);
    }
    Ok(())
}

fn cmd_tune(args: &TuneArgs, file: &FileConfig, seed: u64) -> Result<()> {
    let grid = file.grid.clone().unwrap_or_default();
    let folds = args.folds.or(file.tune.folds).unwrap_or(5);
    let tau = ExpectileLevel::new(args.tau.or(file.tune.tau).unwrap_or(0.5)).map_err(|e| Error::Config(e.to_string()))?;
    let act = activation(args.activation.as_deref(), file.hyper.activation.as_deref())?;
    let start = Instant::now();
    let result = match &args.train {
        Some(path) => grid_search_cv(&io::read_observations(open(path)?)?.observations, &grid, folds, tau, act, seed)?,
        None => {
            let config = BenchmarkConfig {
                scenario: scenario(&args.scenario, &file.scenario, seed)?,
                methods: vec![Method::Daernn],
                replications: 1,
                method: MethodConfig { hyper: DEFAULT_HYPER, activation: act, augment: AugmentConfig::default() },
                train_fraction: file.benchmark.train_fraction.unwrap_or(0.8),
                keep_predictions: false,
            };
            tune_for_scenario(&config, &grid, folds, tau)?
        }
    };
    let seconds = start.elapsed().as_secs_f64();
    io::write_json(&TuningRecord { seconds, result: &result }, create(&args.out)?)?;
    println!("best {:?} (CV loss {}) in {seconds:.1} s", result.best, io::fmt_num(result.best_loss));
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let seed_of = |arg: &SeedArg| arg.seed.or(file.seed).unwrap_or(0);
    let jobs = cli.jobs.or(file.jobs);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Simulate(a) => cmd_simulate(a, &file, seed_of(&a.seed)),
        Command::Inject(a) => cmd_inject(a, seed_of(&a.seed)),
        Command::Fit(a) => cmd_fit(a, &file, seed_of(&a.seed)),
        Command::Predict(a) => cmd_predict(a),
        Command::Benchmark(a) => cmd_benchmark(a, &file, seed_of(&a.seed)),
        Command::Tune(a) => cmd_tune(a, &file, seed_of(&a.seed)),
    })
}

/// Parses `std::env::args`, runs, and returns the process exit status.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn unknown_config_keys_are_named() {
        let err = toml::from_str::<FileConfig>("[hyper]\nlayerz = 3\n").unwrap_err();
        assert!(err.message().contains("layerz"), "{}", err.message());
    }

    #[test]
    fn flags_override_file_values() {
        let file: FileConfig = toml::from_str("[hyper]\nlayers = 3\nnodes = 16\n").unwrap();
        let args = HyperArgs { nodes: Some(64), ..Default::default() };
        let (h, _) = hyper(&args, &file.hyper).unwrap();
        assert_eq!((h.layers, h.nodes, h.epochs), (3, 64, DEFAULT_HYPER.epochs));
    }

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [
            exit_code(&Error::Config("x".into())),
            exit_code(&Error::Schema("x".into())),
            exit_code(&Error::Diverged { epoch: 1, loss: f64::NAN }),
            exit_code(&Error::Io(std::io::Error::other("x"))),
        ];
        assert_eq!(codes, [2, 3, 4, 5]);
    }
}
