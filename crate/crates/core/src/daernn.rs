//! Iterative data augmentation for censored expectile regression.
//!
//! A bank of per-level models is first fitted on the uncensored records.
//! Each iteration then (1) replaces every censored response by a uniformly
//! chosen feasible candidate among the previous bank's fitted expectiles at
//! that point, falling back to the censoring boundary when no candidate is
//! feasible, (2) refits the whole bank on the pseudo-complete data, and
//! (3) predicts the test covariates. The reported predictor is the average of
//! the per-iteration predictions.
//!
//! The learner is pluggable: [`NeuralLearner`] gives the network estimator,
//! and the linear learner in [`crate::baselines`] reuses the same loop.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::censor::{boundary_value, feasible_set, CensoredObservation};
use crate::error::{Error, Result};
use crate::expectile::{default_grid_size, expectile_grid, reporting_levels, ExpectileLevel, LevelGrid};
use crate::nn::{self, MlpParams, MlpSpec, TrainConfig};
use crate::scalar::Scalar;
use crate::seed::{derive_seed, pair_stream, stream_rng};

/// Something that fits a conditional expectile at one level.
pub trait ExpectileLearner<T: Scalar>: Sync {
    type Model: Clone + Send + Sync;

    /// Fits at level `tau`. `warm` is the previous iteration's model at the
    /// same level when warm starts are enabled; learners may ignore it.
    fn fit(
        &self,
        xs: &[Vec<T>],
        ys: &[T],
        tau: ExpectileLevel<T>,
        seed: u64,
        warm: Option<&Self::Model>,
    ) -> Result<Self::Model>;

    fn predict(&self, model: &Self::Model, xs: &[Vec<T>]) -> Result<Vec<T>>;
}

/// An MLP trained by mini-batch gradient descent.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuralLearner {
    pub spec: MlpSpec,
    pub train: TrainConfig,
}

impl<T: Scalar> ExpectileLearner<T> for NeuralLearner {
    type Model = MlpParams<T>;

    fn fit(
        &self,
        xs: &[Vec<T>],
        ys: &[T],
        tau: ExpectileLevel<T>,
        seed: u64,
        warm: Option<&MlpParams<T>>,
    ) -> Result<MlpParams<T>> {
        let config = self.train.with_seed(seed);
        match warm {
            Some(init) => Ok(nn::train_mbgd_from(init.clone(), xs, ys, &config, tau)?.params),
            None => nn::train_mbgd(xs, ys, &self.spec, &config, tau),
        }
    }

    fn predict(&self, model: &MlpParams<T>, xs: &[Vec<T>]) -> Result<Vec<T>> {
        nn::predict(model, xs)
    }
}

/// How per-model training seeds depend on the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedSchedule {
    /// Seed for bank `h`, level `k` is derived from `(seed, h, k)`.
    #[default]
    PerIteration,
    /// Every bank reuses the level seed derived from `(seed, 0, k)`.
    Shared,
}

/// Learner-independent settings of the augmentation loop.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentConfig<T: Scalar = f64> {
    /// Imputation grid size `m`; `None` means `max(floor(sqrt(n)), 99)`.
    pub grid_size: Option<usize>,
    /// Number of augmentation iterations `H`.
    pub iterations: usize,
    /// Levels reported in the output, served by the nearest grid level.
    pub target_levels: Vec<ExpectileLevel<T>>,
    pub seed: u64,
    /// Start each level's refit from the previous bank's model.
    pub warm_start: bool,
    pub seed_schedule: SeedSchedule,
}

impl<T: Scalar> Default for AugmentConfig<T> {
    fn default() -> Self {
        Self {
            grid_size: None,
            iterations: 5,
            target_levels: reporting_levels(),
            seed: 0,
            warm_start: false,
            seed_schedule: SeedSchedule::PerIteration,
        }
    }
}

impl<T: Scalar> AugmentConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::domain("iteration count H must be at least 1"));
        }
        if self.grid_size == Some(0) {
            return Err(Error::domain("grid size m must be at least 1"));
        }
        if self.target_levels.is_empty() {
            return Err(Error::domain("at least one target level is required"));
        }
        Ok(())
    }

    pub fn grid(&self, n: usize) -> Result<LevelGrid<T>> {
        let m = match self.grid_size {
            Some(m) => m,
            None => default_grid_size(n)?,
        };
        expectile_grid(m)
    }

    /// Training seed of the model for bank `iteration`, grid level `level`.
    pub fn model_seed(&self, iteration: usize, level: usize) -> u64 {
        let h = match self.seed_schedule {
            SeedSchedule::PerIteration => iteration,
            SeedSchedule::Shared => 0,
        };
        derive_seed(self.seed, pair_stream(h, level))
    }

    fn augmentation_rng(&self, iteration: usize) -> rand_chacha::ChaCha8Rng {
        stream_rng(derive_seed(self.seed, u64::MAX), iteration as u64)
    }
}

/// Full configuration of the network method.
#[derive(Debug, Clone, PartialEq)]
pub struct DaernnConfig<T: Scalar = f64> {
    pub augment: AugmentConfig<T>,
    pub spec: MlpSpec,
    /// Optimiser settings; the seed field is replaced per model.
    pub train: TrainConfig,
}

impl<T: Scalar> DaernnConfig<T> {
    pub fn learner(&self) -> NeuralLearner {
        NeuralLearner { spec: self.spec.clone(), train: self.train.clone() }
    }
}

/// The models `M^(h)(tau_k)` of one iteration, ordered by level.
#[derive(Debug, Clone)]
pub struct ModelBank<M> {
    pub iteration: usize,
    pub models: Vec<M>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Observed,
    Imputed,
    Fallback,
}

/// Pseudo-complete responses for one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedDataset<T: Scalar = f64> {
    pub targets: Vec<T>,
    pub provenance: Vec<Provenance>,
}

impl<T: Scalar> AugmentedDataset<T> {
    pub fn count(&self, which: Provenance) -> usize {
        self.provenance.iter().filter(|&&p| p == which).count()
    }
}

/// How a requested level was mapped onto the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelMapping {
    pub requested: f64,
    pub grid_index: usize,
    pub grid_level: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentStats {
    pub iteration: usize,
    pub imputed: usize,
    pub fallback: usize,
}

/// Test-set predictions for every iteration and grid level, plus their
/// average.
#[derive(Debug, Clone)]
pub struct ExpectilePredictionSet<T: Scalar = f64> {
    pub grid: LevelGrid<T>,
    /// `per_iteration[h - 1][k][i]`.
    pub per_iteration: Vec<Vec<Vec<T>>>,
    /// `average[k][i]`, the mean over iterations.
    pub average: Vec<Vec<T>>,
    pub mapping: Vec<LevelMapping>,
    pub augmentation: Vec<AugmentStats>,
}

impl<T: Scalar> ExpectilePredictionSet<T> {
    pub fn n_test(&self) -> usize {
        self.average.first().map_or(0, Vec::len)
    }

    /// Averaged predictions at the `j`-th requested level.
    pub fn reported(&self, j: usize) -> &[T] {
        &self.average[self.mapping[j].grid_index]
    }

    /// Iteration-`h` (1-based) predictions at the `j`-th requested level.
    pub fn reported_at_iteration(&self, j: usize, h: usize) -> &[T] {
        &self.per_iteration[h - 1][self.mapping[j].grid_index]
    }
}

/// Mean of `values` computed as `v_0 + sum (v_h - v_0) / H`, which returns
/// `v_0` bitwise when all values agree.
pub fn iteration_mean<T: Scalar>(values: impl Iterator<Item = T> + Clone) -> T {
    let mut it = values.clone();
    let first = it.next().expect("at least one iteration");
    let count = T::from_count(values.clone().count());
    first + values.map(|v| v - first).sum::<T>() / count
}

pub fn level_mapping<T: Scalar>(grid: &LevelGrid<T>, targets: &[ExpectileLevel<T>]) -> Vec<LevelMapping> {
    targets
        .iter()
        .map(|&tau| {
            let k = grid.nearest(tau);
            LevelMapping { requested: tau.value().as_f64(), grid_index: k, grid_level: grid.get(k).value().as_f64() }
        })
        .collect()
}

fn covariates<T: Scalar>(data: &[CensoredObservation<T>]) -> Vec<Vec<T>> {
    data.iter().map(|o| o.x.clone()).collect()
}

fn fit_bank<T: Scalar, L: ExpectileLearner<T>>(
    learner: &L,
    xs: &[Vec<T>],
    ys: &[T],
    grid: &LevelGrid<T>,
    config: &AugmentConfig<T>,
    iteration: usize,
    previous: Option<&ModelBank<L::Model>>,
) -> Result<ModelBank<L::Model>> {
    let models = grid
        .levels()
        .par_iter()
        .enumerate()
        .map(|(k, &tau)| {
            let warm = previous.filter(|_| config.warm_start).map(|b| &b.models[k]);
            learner
                .fit(xs, ys, tau, config.model_seed(iteration, k), warm)
                .map_err(|e| Error::Level {
                    iteration,
                    level: k,
                    tau: tau.value().as_f64(),
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModelBank { iteration, models })
}

/// Fits `M^(0)(tau_k)` for every grid level on the uncensored records only.
pub fn initialize<T: Scalar, L: ExpectileLearner<T>>(
    learner: &L,
    train_data: &[CensoredObservation<T>],
    grid: &LevelGrid<T>,
    config: &AugmentConfig<T>,
) -> Result<ModelBank<L::Model>> {
    let (xs, ys): (Vec<Vec<T>>, Vec<T>) = train_data
        .iter()
        .filter(|o| !o.is_censored())
        .map(|o| (o.x.clone(), o.t))
        .unzip();
    if xs.is_empty() {
        return Err(Error::Initialization("training data has no uncensored observations".into()));
    }
    if xs.len() < 30 {
        log::warn!("initial models fitted on only {} uncensored observations", xs.len());
    }
    fit_bank(learner, &xs, &ys, grid, config, 0, None)
}

/// Imputes every censored response from the bank's fitted expectiles at that
/// observation: candidates inside the feasible set are drawn uniformly,
/// otherwise the censoring boundary is used.
pub fn augment<T: Scalar, L: ExpectileLearner<T>, R: Rng + ?Sized>(
    learner: &L,
    bank: &ModelBank<L::Model>,
    data: &[CensoredObservation<T>],
    rng: &mut R,
) -> Result<AugmentedDataset<T>> {
    let censored: Vec<usize> = (0..data.len()).filter(|&i| data[i].is_censored()).collect();
    let censored_x: Vec<Vec<T>> = censored.iter().map(|&i| data[i].x.clone()).collect();
    // candidates[k][j]: level-k fitted value at the j-th censored record.
    let candidates = if censored.is_empty() {
        Vec::new()
    } else {
        bank.models
            .par_iter()
            .map(|model| learner.predict(model, &censored_x))
            .collect::<Result<Vec<_>>>()?
    };

    let mut targets: Vec<T> = data.iter().map(|o| o.t).collect();
    let mut provenance = vec![Provenance::Observed; data.len()];
    let mut feasible = Vec::with_capacity(bank.models.len());
    for (j, &i) in censored.iter().enumerate() {
        let set = feasible_set(&data[i]);
        feasible.clear();
        feasible.extend(candidates.iter().map(|c| c[j]).filter(|&v| set.contains(v)));
        if feasible.is_empty() {
            targets[i] = boundary_value(&data[i])?;
            provenance[i] = Provenance::Fallback;
        } else {
            targets[i] = feasible[rng.random_range(0..feasible.len())];
            provenance[i] = Provenance::Imputed;
        }
    }
    Ok(AugmentedDataset { targets, provenance })
}

/// Refits every grid level on the augmented responses, producing bank
/// `iteration`.
pub fn update<T: Scalar, L: ExpectileLearner<T>>(
    learner: &L,
    xs: &[Vec<T>],
    augmented: &AugmentedDataset<T>,
    grid: &LevelGrid<T>,
    config: &AugmentConfig<T>,
    iteration: usize,
    previous: Option<&ModelBank<L::Model>>,
) -> Result<ModelBank<L::Model>> {
    if xs.len() != augmented.targets.len() {
        return Err(Error::domain("augmented responses do not cover the training data"));
    }
    fit_bank(learner, xs, &augmented.targets, grid, config, iteration, previous)
}

/// Predictions of every bank member on `xs`, indexed `[k][i]`.
pub fn predict_bank<T: Scalar, L: ExpectileLearner<T>>(
    learner: &L,
    bank: &ModelBank<L::Model>,
    xs: &[Vec<T>],
) -> Result<Vec<Vec<T>>> {
    bank.models.par_iter().map(|m| learner.predict(m, xs)).collect()
}

/// A finished run: the predictions plus the final bank, which [`crate::io`]
/// can persist.
pub struct AugmentedFit<T: Scalar, M> {
    pub predictions: ExpectilePredictionSet<T>,
    /// Banks `1..=H`; only kept when requested.
    pub banks: Vec<ModelBank<M>>,
}

/// Runs initialisation and `H` augment/update/predict iterations with any
/// learner.
pub fn run_with<T: Scalar, L: ExpectileLearner<T>>(
    learner: &L,
    train_data: &[CensoredObservation<T>],
    test_x: &[Vec<T>],
    config: &AugmentConfig<T>,
    keep_banks: bool,
) -> Result<AugmentedFit<T, L::Model>> {
    config.validate()?;
    if train_data.is_empty() {
        return Err(Error::Initialization("empty training data".into()));
    }
    let p = train_data[0].x.len();
    if train_data.iter().any(|o| o.x.len() != p) || test_x.iter().any(|x| x.len() != p) {
        return Err(Error::domain(format!("all covariate vectors must have length {p}")));
    }
    let grid = config.grid(train_data.len())?;
    let xs = covariates(train_data);
    let mut bank = initialize(learner, train_data, &grid, config)?;
    let mut per_iteration = Vec::with_capacity(config.iterations);
    let mut augmentation = Vec::with_capacity(config.iterations);
    let mut banks = Vec::new();
    for h in 1..=config.iterations {
        let mut rng = config.augmentation_rng(h);
        let augmented = augment(learner, &bank, train_data, &mut rng)?;
        augmentation.push(AugmentStats {
            iteration: h,
            imputed: augmented.count(Provenance::Imputed),
            fallback: augmented.count(Provenance::Fallback),
        });
        bank = update(learner, &xs, &augmented, &grid, config, h, Some(&bank))?;
        per_iteration.push(predict_bank(learner, &bank, test_x)?);
        if keep_banks {
            banks.push(bank.clone());
        }
    }
    let average = (0..grid.m())
        .map(|k| {
            (0..test_x.len())
                .map(|i| iteration_mean(per_iteration.iter().map(|it: &Vec<Vec<T>>| it[k][i])))
                .collect()
        })
        .collect();
    let mapping = level_mapping(&grid, &config.target_levels);
    Ok(AugmentedFit {
        predictions: ExpectilePredictionSet { grid, per_iteration, average, mapping, augmentation },
        banks,
    })
}

/// The network estimator end to end.
pub fn run<T: Scalar>(
    train_data: &[CensoredObservation<T>],
    test_x: &[Vec<T>],
    config: &DaernnConfig<T>,
) -> Result<ExpectilePredictionSet<T>> {
    Ok(run_with(&config.learner(), train_data, test_x, &config.augment, false)?.predictions)
}
