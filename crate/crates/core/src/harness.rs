//! Metrics, cross-validated tuning and the Monte-Carlo replication runner.

use std::cmp::Ordering;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{train_full, train_oracle, LinearExpectileModel, LinearLearner};
use crate::censor::CensoredObservation;
use crate::daernn::{
    self, level_mapping, run_with, AugmentConfig, AugmentStats, ExpectilePredictionSet, LevelMapping, ModelBank,
    NeuralLearner,
};
use crate::error::{Error, Result};
use crate::expectile::{check_loss, ExpectileLevel};
use crate::io::fmt_num;
use crate::nn::{self, Activation, MlpParams, MlpSpec, TrainConfig};
use crate::scalar::Scalar;
use crate::seed::{derive_seed, stream_rng};
use crate::simgen::{gen_scenario, train_test_split, ScenarioSpec};

/// Mean check loss of `y - yhat` at level `tau`.
pub fn expectile_loss_metric<T: Scalar>(y: &[T], yhat: &[T], tau: ExpectileLevel<T>) -> Result<T> {
    if y.len() != yhat.len() {
        return Err(Error::domain(format!("length mismatch: {} responses, {} predictions", y.len(), yhat.len())));
    }
    if y.is_empty() {
        return Err(Error::domain("expectile loss of an empty sample"));
    }
    let mut total = T::zero();
    for (&a, &b) in y.iter().zip(yhat) {
        total += check_loss(a - b, tau)?;
    }
    Ok(total / T::from_count(y.len()))
}

pub fn el_ratio(el_daernn: f64, el_compete: f64) -> Result<f64> {
    if !(el_compete > 0.0) {
        return Err(Error::domain(format!("competitor loss {el_compete} must be positive")));
    }
    Ok(el_daernn / el_compete)
}

/// `k` disjoint folds covering `0..n` after a seeded shuffle; sizes differ by
/// at most one.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 || k > n {
        return Err(Error::domain(format!("need 2 <= k <= n, got k = {k}, n = {n}")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut stream_rng(seed, 0));
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(idx[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

/// One point of the tuning grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperParams {
    pub layers: usize,
    pub nodes: usize,
    pub learning_rate: f64,
    pub dropout: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

impl HyperParams {
    pub fn spec(&self, input_dim: usize, activation: Activation) -> Result<MlpSpec> {
        MlpSpec::new(input_dim, vec![self.nodes; self.layers], activation, self.dropout)
    }

    pub fn train(&self, seed: u64) -> TrainConfig {
        TrainConfig { learning_rate: self.learning_rate, epochs: self.epochs, batch_size: self.batch_size, seed }
    }

    /// Preference order among equally good points: smaller in each field,
    /// compared field by field.
    pub fn tie_cmp(&self, other: &Self) -> Ordering {
        self.layers
            .cmp(&other.layers)
            .then(self.nodes.cmp(&other.nodes))
            .then(self.learning_rate.total_cmp(&other.learning_rate))
            .then(self.dropout.total_cmp(&other.dropout))
            .then(self.epochs.cmp(&other.epochs))
            .then(self.batch_size.cmp(&other.batch_size))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperGrid {
    pub layers: Vec<usize>,
    pub nodes: Vec<usize>,
    pub learning_rates: Vec<f64>,
    pub dropouts: Vec<f64>,
    pub epochs: Vec<usize>,
    pub batch_sizes: Vec<usize>,
}

impl Default for HyperGrid {
    fn default() -> Self {
        Self {
            layers: vec![2, 3, 4],
            nodes: vec![16, 32, 64],
            learning_rates: vec![0.01, 0.1],
            dropouts: vec![0.1, 0.2, 0.3],
            epochs: vec![50, 100],
            batch_sizes: vec![64, 128, 256],
        }
    }
}

impl HyperGrid {
    pub fn single(p: HyperParams) -> Self {
        Self {
            layers: vec![p.layers],
            nodes: vec![p.nodes],
            learning_rates: vec![p.learning_rate],
            dropouts: vec![p.dropout],
            epochs: vec![p.epochs],
            batch_sizes: vec![p.batch_size],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lens = [
            ("layers", self.layers.len()),
            ("nodes", self.nodes.len()),
            ("learning_rates", self.learning_rates.len()),
            ("dropouts", self.dropouts.len()),
            ("epochs", self.epochs.len()),
            ("batch_sizes", self.batch_sizes.len()),
        ];
        match lens.iter().find(|(_, n)| *n == 0) {
            Some((name, _)) => Err(Error::Config(format!("hyperparameter grid field `{name}` is empty"))),
            None => Ok(()),
        }
    }

    pub fn points(&self) -> Vec<HyperParams> {
        let mut out = Vec::new();
        for &layers in &self.layers {
            for &nodes in &self.nodes {
                for &learning_rate in &self.learning_rates {
                    for &dropout in &self.dropouts {
                        for &epochs in &self.epochs {
                            for &batch_size in &self.batch_sizes {
                                out.push(HyperParams { layers, nodes, learning_rate, dropout, epochs, batch_size });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRow {
    pub params: HyperParams,
    /// Held-out loss per fold; `None` where training failed.
    pub fold_losses: Vec<Option<f64>>,
    /// Mean held-out loss, `+inf` if any fold failed.
    pub mean_loss: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub best: HyperParams,
    pub best_loss: f64,
    pub table: Vec<CvRow>,
}

/// Cross-validated grid search over the uncensored records of `data`.
pub fn grid_search_cv<T: Scalar>(
    data: &[CensoredObservation<T>],
    grid: &HyperGrid,
    k: usize,
    tau: ExpectileLevel<T>,
    activation: Activation,
    seed: u64,
) -> Result<CvResult> {
    grid.validate()?;
    let (xs, ys): (Vec<&[T]>, Vec<T>) =
        data.iter().filter(|o| !o.is_censored()).map(|o| (o.x.as_slice(), o.t)).unzip();
    if xs.len() < k {
        return Err(Error::domain(format!("{} uncensored observations cannot form {k} folds", xs.len())));
    }
    let p = xs[0].len();
    let folds = kfold_split(xs.len(), k, seed)?;
    let splits: Vec<(Vec<usize>, &Vec<usize>)> = (0..k)
        .map(|f| {
            let train = (0..k).filter(|&g| g != f).flat_map(|g| folds[g].iter().copied()).collect();
            (train, &folds[f])
        })
        .collect();
    let table: Vec<CvRow> = grid
        .points()
        .into_par_iter()
        .map(|params| {
            let mut fold_losses = Vec::with_capacity(k);
            let mut error = None;
            for (f, (train, held)) in splits.iter().enumerate() {
                let score = params.spec(p, activation).and_then(|spec| {
                    let tx: Vec<&[T]> = train.iter().map(|&i| xs[i]).collect();
                    let ty: Vec<T> = train.iter().map(|&i| ys[i]).collect();
                    let model = nn::train_mbgd(&tx, &ty, &spec, &params.train(derive_seed(seed, 1 + f as u64)), tau)?;
                    let hx: Vec<&[T]> = held.iter().map(|&i| xs[i]).collect();
                    let hy: Vec<T> = held.iter().map(|&i| ys[i]).collect();
                    let loss = expectile_loss_metric(&hy, &nn::predict(&model, &hx)?, tau)?.as_f64();
                    if loss.is_finite() {
                        Ok(loss)
                    } else {
                        Err(Error::Diverged { epoch: params.epochs, loss })
                    }
                });
                match score {
                    Ok(v) => fold_losses.push(Some(v)),
                    Err(e) => {
                        log::warn!("grid point {params:?}, fold {f}: {e}");
                        error.get_or_insert_with(|| e.to_string());
                        fold_losses.push(None);
                    }
                }
            }
            let mean_loss = if error.is_some() {
                f64::INFINITY
            } else {
                fold_losses.iter().flatten().sum::<f64>() / k as f64
            };
            CvRow { params, fold_losses, mean_loss, error }
        })
        .collect();
    let best = table
        .iter()
        .min_by(|a, b| a.mean_loss.total_cmp(&b.mean_loss).then(a.params.tie_cmp(&b.params)))
        .expect("grid is nonempty");
    Ok(CvResult { best: best.params, best_loss: best.mean_loss, table })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Daernn,
    Full,
    Oracle,
    #[serde(rename = "dalinear")]
    DaLinear,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Daernn, Method::Full, Method::Oracle, Method::DaLinear];

    pub fn name(self) -> &'static str {
        match self {
            Method::Daernn => "daernn",
            Method::Full => "full",
            Method::Oracle => "oracle",
            Method::DaLinear => "dalinear",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown method `{s}` (expected daernn, full, oracle or dalinear)")))
    }
}

/// Everything a fit needs apart from the data.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodConfig {
    pub hyper: HyperParams,
    pub activation: Activation,
    pub augment: AugmentConfig<f64>,
}

/// Predictions of one method at each requested level.
#[derive(Debug, Clone)]
pub struct MethodFit {
    pub mapping: Vec<LevelMapping>,
    /// `predictions[j][i]` for requested level `j`, test point `i`.
    pub predictions: Vec<Vec<f64>>,
    /// `per_iteration[h][j][i]`; empty for single-fit methods.
    pub per_iteration: Vec<Vec<Vec<f64>>>,
    pub augmentation: Vec<AugmentStats>,
}

/// Trained models at the requested levels, `[h][j]`; single-fit methods
/// have one bank.
#[derive(Debug, Clone)]
pub enum FittedModels {
    Neural(Vec<Vec<MlpParams>>),
    Linear(Vec<Vec<LinearExpectileModel>>),
}

impl FittedModels {
    pub fn iterations(&self) -> usize {
        match self {
            FittedModels::Neural(b) => b.len(),
            FittedModels::Linear(b) => b.len(),
        }
    }

    /// Per-bank predictions `[h][j][i]`.
    pub fn predict_iterations(&self, xs: &[Vec<f64>]) -> Result<Vec<Vec<Vec<f64>>>> {
        match self {
            FittedModels::Neural(banks) => banks
                .iter()
                .map(|b| b.par_iter().map(|m| nn::predict(m, xs)).collect())
                .collect(),
            FittedModels::Linear(banks) => {
                banks.iter().map(|b| b.iter().map(|m| m.predict(xs)).collect()).collect()
            }
        }
    }

    /// Bank-averaged predictions `[j][i]`.
    pub fn predict(&self, xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        Ok(average_banks(&self.predict_iterations(xs)?))
    }
}

fn average_banks(per_iteration: &[Vec<Vec<f64>>]) -> Vec<Vec<f64>> {
    let levels = per_iteration.first().map_or(0, Vec::len);
    (0..levels)
        .map(|j| {
            (0..per_iteration[0][j].len())
                .map(|i| daernn::iteration_mean(per_iteration.iter().map(|it| it[j][i])))
                .collect()
        })
        .collect()
}

/// Fits `method` and predicts `test_x` at every requested level.
///
/// FULL and Oracle train level `tau_k` with the seed the augmentation loop
/// uses for its initial bank, so all three neural methods coincide on
/// uncensored data under [`daernn::SeedSchedule::Shared`].
pub fn fit_method(
    method: Method,
    train: &[CensoredObservation],
    test_x: &[Vec<f64>],
    config: &MethodConfig,
) -> Result<MethodFit> {
    Ok(fit_impl(method, train, test_x, config, false)?.0)
}

/// As [`fit_method`], also returning the models behind the predictions.
pub fn fit_method_keep(
    method: Method,
    train: &[CensoredObservation],
    test_x: &[Vec<f64>],
    config: &MethodConfig,
) -> Result<(MethodFit, FittedModels)> {
    let (fit, models) = fit_impl(method, train, test_x, config, true)?;
    Ok((fit, models.expect("models were kept")))
}

fn select<M: Clone>(banks: &[ModelBank<M>], mapping: &[LevelMapping]) -> Vec<Vec<M>> {
    banks.iter().map(|b| mapping.iter().map(|m| b.models[m.grid_index].clone()).collect()).collect()
}

fn fit_impl(
    method: Method,
    train: &[CensoredObservation],
    test_x: &[Vec<f64>],
    config: &MethodConfig,
    keep: bool,
) -> Result<(MethodFit, Option<FittedModels>)> {
    if train.is_empty() {
        return Err(Error::domain("empty training data"));
    }
    let p = train[0].x.len();
    let spec = config.hyper.spec(p, config.activation)?;
    let from_set = |set: ExpectilePredictionSet<f64>| {
        let pick = |grid: &Vec<Vec<f64>>| set.mapping.iter().map(|m| grid[m.grid_index].clone()).collect();
        MethodFit {
            predictions: pick(&set.average),
            per_iteration: set.per_iteration.iter().map(pick).collect(),
            mapping: set.mapping,
            augmentation: set.augmentation,
        }
    };
    match method {
        Method::Daernn => {
            let learner = NeuralLearner { spec, train: config.hyper.train(0) };
            let out = run_with(&learner, train, test_x, &config.augment, keep)?;
            let models = keep.then(|| FittedModels::Neural(select(&out.banks, &out.predictions.mapping)));
            Ok((from_set(out.predictions), models))
        }
        Method::DaLinear => {
            let out = run_with(&LinearLearner, train, test_x, &config.augment, keep)?;
            let models = keep.then(|| FittedModels::Linear(select(&out.banks, &out.predictions.mapping)));
            Ok((from_set(out.predictions), models))
        }
        Method::Full | Method::Oracle => {
            config.augment.validate()?;
            let grid = config.augment.grid(train.len())?;
            let mapping = level_mapping(&grid, &config.augment.target_levels);
            let models = mapping
                .par_iter()
                .map(|m| {
                    let tau = grid.get(m.grid_index);
                    let train_cfg = config.hyper.train(config.augment.model_seed(0, m.grid_index));
                    if method == Method::Full {
                        train_full(train, &spec, &train_cfg, tau)
                    } else {
                        train_oracle(train, &spec, &train_cfg, tau)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let predictions = models.par_iter().map(|m| nn::predict(m, test_x)).collect::<Result<Vec<_>>>()?;
            let models = keep.then(|| FittedModels::Neural(vec![models]));
            Ok((MethodFit { mapping, predictions, per_iteration: Vec::new(), augmentation: Vec::new() }, models))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub scenario: ScenarioSpec,
    pub methods: Vec<Method>,
    pub replications: usize,
    pub method: MethodConfig,
    pub train_fraction: f64,
    /// Keep test predictions for the plot output.
    pub keep_predictions: bool,
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replication count must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!("train fraction {} outside (0, 1)", self.train_fraction)));
        }
        self.method.augment.validate()?;
        self.method.hyper.spec(2, self.method.activation)?;
        self.method.hyper.train(0).validate()
    }

    /// Data seed of replication `r` (1-based).
    pub fn replication_seed(&self, r: usize) -> u64 {
        self.scenario.seed.wrapping_add(r as u64)
    }
}

#[derive(Debug, Clone)]
pub struct MethodOutcome {
    pub method: Method,
    /// Test EL per requested level; `None` when the fit failed.
    pub el: Option<Vec<f64>>,
    pub seconds: f64,
    pub error: Option<String>,
    pub predictions: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone)]
pub struct ReplicationResult {
    pub replication: usize,
    pub seed: u64,
    pub outcomes: Vec<MethodOutcome>,
}

impl ReplicationResult {
    pub fn outcome(&self, method: Method) -> Option<&MethodOutcome> {
        self.outcomes.iter().find(|o| o.method == method)
    }

    /// `EL(DAERNN) / EL(method)` per level, when both fits succeeded.
    pub fn ratios(&self, method: Method) -> Option<Vec<f64>> {
        let own = self.outcome(Method::Daernn)?.el.as_ref()?;
        let other = self.outcome(method)?.el.as_ref()?;
        own.iter().zip(other).map(|(&a, &b)| el_ratio(a, b).ok()).collect()
    }
}

/// Simulates, splits and fits every method for replication `r`.
pub fn run_replication(config: &BenchmarkConfig, r: usize) -> Result<ReplicationResult> {
    let seed = config.replication_seed(r);
    let data = gen_scenario(&ScenarioSpec { seed, ..config.scenario })?;
    let (train, test) = train_test_split(&data, config.train_fraction, derive_seed(seed, 2))?;
    let test_x: Vec<Vec<f64>> = test.iter().map(|o| o.x.clone()).collect();
    let test_y: Vec<f64> = test
        .iter()
        .map(|o| o.y_true.ok_or_else(|| Error::Schema("test data lacks y_true".into())))
        .collect::<Result<_>>()?;
    let mut method = config.method.clone();
    method.augment.seed = derive_seed(seed, 3);
    let outcomes = config
        .methods
        .iter()
        .map(|&m| {
            let start = Instant::now();
            let fit = fit_method(m, &train, &test_x, &method);
            let seconds = start.elapsed().as_secs_f64();
            let scored = fit.and_then(|fit| {
                let el = fit
                    .mapping
                    .iter()
                    .zip(&fit.predictions)
                    .map(|(map, pred)| expectile_loss_metric(&test_y, pred, ExpectileLevel::new(map.requested)?))
                    .collect::<Result<Vec<f64>>>()?;
                Ok((el, fit.predictions))
            });
            match scored {
                Ok((el, predictions)) => MethodOutcome {
                    method: m,
                    el: Some(el),
                    seconds,
                    error: None,
                    predictions: config.keep_predictions.then_some(predictions),
                },
                Err(e) => {
                    log::warn!("replication {r}, method {m}: {e}");
                    MethodOutcome { method: m, el: None, seconds, error: Some(e.to_string()), predictions: None }
                }
            }
        })
        .collect();
    Ok(ReplicationResult { replication: r, seed, outcomes })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub method: Method,
    pub tau: f64,
    pub mean_el: Option<f64>,
    /// Mean over replications of `EL(DAERNN) / EL(method)`.
    pub mean_ratio: Option<f64>,
    pub median_ratio: Option<f64>,
    pub completed: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRow {
    pub method: Method,
    pub mean_seconds: f64,
    pub total_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct ReplicationSummary {
    pub scenario: String,
    pub levels: Vec<f64>,
    pub replications: usize,
    pub rows: Vec<SummaryRow>,
    pub timing: Vec<TimingRow>,
    pub details: Vec<ReplicationResult>,
}

impl ReplicationSummary {
    pub fn row(&self, method: Method, tau: f64) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.method == method && (r.tau - tau).abs() < 1e-9)
    }
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    Some(if n % 2 == 1 { s[n / 2] } else { 0.5 * (s[n / 2 - 1] + s[n / 2]) })
}

/// Aggregates replication results in replication order.
pub fn summarize(config: &BenchmarkConfig, details: Vec<ReplicationResult>) -> ReplicationSummary {
    let levels: Vec<f64> = config.method.augment.target_levels.iter().map(|t| t.value()).collect();
    let mut rows = Vec::new();
    let mut timing = Vec::new();
    for &m in &config.methods {
        let done: Vec<&Vec<f64>> =
            details.iter().filter_map(|d| d.outcome(m).and_then(|o| o.el.as_ref())).collect();
        let ratios: Vec<Vec<f64>> = details.iter().filter_map(|d| d.ratios(m)).collect();
        let failures = details.len() - done.len();
        for (j, &tau) in levels.iter().enumerate() {
            let els: Vec<f64> = done.iter().map(|e| e[j]).collect();
            let rj: Vec<f64> = ratios.iter().map(|r| r[j]).collect();
            rows.push(SummaryRow {
                method: m,
                tau,
                mean_el: mean(&els),
                mean_ratio: mean(&rj),
                median_ratio: median(&rj),
                completed: done.len(),
                failures,
            });
        }
        let secs: Vec<f64> = details.iter().filter_map(|d| d.outcome(m)).map(|o| o.seconds).collect();
        timing.push(TimingRow {
            method: m,
            mean_seconds: mean(&secs).unwrap_or(0.0),
            total_seconds: secs.iter().sum(),
        });
    }
    ReplicationSummary { scenario: config.scenario.id(), levels, replications: details.len(), rows, timing, details }
}

/// Runs replications `1..=R` in parallel and aggregates them.
pub fn run_replications(config: &BenchmarkConfig) -> Result<ReplicationSummary> {
    config.validate()?;
    let details = (1..=config.replications)
        .into_par_iter()
        .map(|r| run_replication(config, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(config, details))
}

/// Tunes once on the uncensored training records of replication 1.
pub fn tune_for_scenario(
    config: &BenchmarkConfig,
    grid: &HyperGrid,
    k: usize,
    tau: ExpectileLevel,
) -> Result<CvResult> {
    let seed = config.replication_seed(1);
    let data = gen_scenario(&ScenarioSpec { seed, ..config.scenario })?;
    let (train, _) = train_test_split(&data, config.train_fraction, derive_seed(seed, 2))?;
    grid_search_cv(&train, grid, k, tau, config.method.activation, derive_seed(seed, 4))
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

pub fn write_summary_csv<W: Write>(summary: &ReplicationSummary, w: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["scenario", "method", "tau", "mean_el", "mean_ratio", "median_ratio", "completed", "failures"])?;
    for r in &summary.rows {
        csv.write_record([
            summary.scenario.clone(),
            r.method.to_string(),
            fmt_num(r.tau),
            opt(r.mean_el),
            opt(r.mean_ratio),
            opt(r.median_ratio),
            r.completed.to_string(),
            r.failures.to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

/// One row per (replication, method, level).
pub fn write_detail_csv<W: Write>(summary: &ReplicationSummary, w: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["scenario", "replication", "seed", "method", "tau", "el", "ratio", "error"])?;
    for d in &summary.details {
        for o in &d.outcomes {
            let ratios = d.ratios(o.method);
            for (j, &tau) in summary.levels.iter().enumerate() {
                csv.write_record([
                    summary.scenario.clone(),
                    d.replication.to_string(),
                    d.seed.to_string(),
                    o.method.to_string(),
                    fmt_num(tau),
                    opt(o.el.as_ref().map(|e| e[j])),
                    opt(ratios.as_ref().map(|r| r[j])),
                    o.error.clone().unwrap_or_default(),
                ])?;
            }
        }
    }
    csv.flush()?;
    Ok(())
}

/// Long format: per-replication EL and, when kept, every test prediction.
pub fn write_plot_csv<W: Write>(summary: &ReplicationSummary, w: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["scenario", "replication", "method", "tau", "quantity", "index", "value"])?;
    for d in &summary.details {
        for o in &d.outcomes {
            for (j, &tau) in summary.levels.iter().enumerate() {
                let head = [summary.scenario.clone(), d.replication.to_string(), o.method.to_string(), fmt_num(tau)];
                if let Some(el) = &o.el {
                    csv.write_record(head.iter().cloned().chain(["el".into(), String::new(), fmt_num(el[j])]))?;
                }
                if let Some(pred) = &o.predictions {
                    for (i, &v) in pred[j].iter().enumerate() {
                        csv.write_record(
                            head.iter().cloned().chain(["prediction".into(), i.to_string(), fmt_num(v)]),
                        )?;
                    }
                }
            }
        }
    }
    csv.flush()?;
    Ok(())
}

/// Wall-clock fitting time; kept apart from the summary, which is
/// reproducible byte for byte.
pub fn write_timing_csv<W: Write>(summary: &ReplicationSummary, w: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["scenario", "replication", "method", "seconds"])?;
    for d in &summary.details {
        for o in &d.outcomes {
            csv.write_record([
                summary.scenario.clone(),
                d.replication.to_string(),
                o.method.to_string(),
                fmt_num(o.seconds),
            ])?;
        }
    }
    for t in &summary.timing {
        csv.write_record([summary.scenario.clone(), "mean".into(), t.method.to_string(), fmt_num(t.mean_seconds)])?;
    }
    csv.flush()?;
    Ok(())
}
