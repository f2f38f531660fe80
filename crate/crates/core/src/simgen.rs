//! Synthetic data: the homoscedastic and heteroscedastic regression models,
//! two error laws, and the censoring-bound table for each scenario cell.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Normal, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::censor::{inject_censoring, BoundDist, BoundSampler, CensorType, CensoredObservation};
use crate::error::{Error, Result};
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    /// `y = sin(2 x1) + 2 exp(-16 x2^2) + 0.5 e`, `x1, x2 ~ N(0, 0.5^2)`.
    Model1,
    /// `y = 1 + sin(x1) + exp(0.5 x1^2 - x1 x2 + 0.2 x2^2) + |(1 + 0.2 (x1 + x2)) / 5| e`,
    /// `x1 ~ U(-1, 1)`, `x2 ~ N(0, 1)`.
    Model2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorLaw {
    StdNormal,
    /// Student t with 3 degrees of freedom.
    StudentT3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CensorRate {
    P25,
    P50,
}

impl CensorRate {
    pub fn nominal(self) -> f64 {
        match self {
            CensorRate::P25 => 0.25,
            CensorRate::P50 => 0.50,
        }
    }
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "1" | "model1" | "m1" => Ok(Model::Model1),
            "2" | "model2" | "m2" => Ok(Model::Model2),
            _ => Err(Error::Config(format!("unknown model `{s}` (expected 1 or 2)"))),
        }
    }
}

impl std::str::FromStr for ErrorLaw {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "normal" | "n" | "stdnormal" => Ok(ErrorLaw::StdNormal),
            "t3" | "t" | "studentt3" => Ok(ErrorLaw::StudentT3),
            _ => Err(Error::Config(format!("unknown error law `{s}` (expected normal or t3)"))),
        }
    }
}

impl std::str::FromStr for CensorRate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim_end_matches('%') {
            "25" | "0.25" => Ok(CensorRate::P25),
            "50" | "0.5" | "0.50" => Ok(CensorRate::P50),
            _ => Err(Error::Config(format!("unknown censoring rate `{s}` (expected 25 or 50)"))),
        }
    }
}

/// One simulation scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub model: Model,
    pub error: ErrorLaw,
    pub censor_kind: CensorType,
    pub rate: CensorRate,
    pub n: usize,
    pub seed: u64,
}

impl ScenarioSpec {
    /// Identifier such as `model1-normal-right-25`.
    pub fn id(&self) -> String {
        let model = match self.model {
            Model::Model1 => "model1",
            Model::Model2 => "model2",
        };
        let err = match self.error {
            ErrorLaw::StdNormal => "normal",
            ErrorLaw::StudentT3 => "t3",
        };
        let rate = match self.rate {
            CensorRate::P25 => "25",
            CensorRate::P50 => "50",
        };
        format!("{model}-{err}-{}-{rate}", self.censor_kind.name())
    }

    pub fn sampler(&self) -> Result<BoundSampler> {
        table1_sampler(self.model, self.error, self.censor_kind, self.rate)
    }
}

/// Censoring-bound distributions per `(model, error, type, rate)` cell.
/// Exponential entries are mean-parameterised.
pub fn table1_sampler(
    model: Model,
    error: ErrorLaw,
    kind: CensorType,
    rate: CensorRate,
) -> Result<BoundSampler> {
    use BoundDist::{Exponential as E, Normal as N};
    use CensorRate::*;
    let n = |mean: f64| N { mean, sd: 2.0 };
    let e = |mean: f64| E { mean };
    let sampler = match (model, kind, rate) {
        (_, CensorType::Uncensored, _) => {
            return Err(Error::domain("no censoring-bound table entry for uncensored data"))
        }
        (Model::Model1, CensorType::Right, P25) => BoundSampler::Right(match error {
            ErrorLaw::StdNormal => n(1.4),
            ErrorLaw::StudentT3 => n(1.5),
        }),
        (Model::Model1, CensorType::Right, P50) => BoundSampler::Right(match error {
            ErrorLaw::StdNormal => n(0.6),
            ErrorLaw::StudentT3 => n(0.65),
        }),
        (Model::Model1, CensorType::Left, P25) => BoundSampler::Left(n(0.0)),
        (Model::Model1, CensorType::Left, P50) => BoundSampler::Left(n(0.6)),
        (Model::Model1, CensorType::Interval, P25) => {
            BoundSampler::Interval { lower: n(-0.5), upper: n(0.0) }
        }
        (Model::Model1, CensorType::Interval, P50) => {
            BoundSampler::Interval { lower: n(0.0), upper: n(1.5) }
        }
        (Model::Model2, CensorType::Right, P25) => BoundSampler::Right(e(4.0)),
        (Model::Model2, CensorType::Right, P50) => BoundSampler::Right(e(3.0)),
        (Model::Model2, CensorType::Left, P25) => BoundSampler::Left(e(2.0)),
        (Model::Model2, CensorType::Left, P50) => BoundSampler::Left(e(3.0)),
        (Model::Model2, CensorType::Interval, P25) => {
            BoundSampler::Interval { lower: e(0.85), upper: e(1.35) }
        }
        (Model::Model2, CensorType::Interval, P50) => {
            BoundSampler::Interval { lower: e(0.55), upper: e(1.45) }
        }
    };
    Ok(sampler)
}

/// Every `(model, error, type, rate)` combination with a table entry.
pub fn table1_cells() -> Vec<(Model, ErrorLaw, CensorType, CensorRate)> {
    let mut cells = Vec::with_capacity(24);
    for model in [Model::Model1, Model::Model2] {
        for error in [ErrorLaw::StdNormal, ErrorLaw::StudentT3] {
            for rate in [CensorRate::P25, CensorRate::P50] {
                for kind in [CensorType::Right, CensorType::Left, CensorType::Interval] {
                    cells.push((model, error, kind, rate));
                }
            }
        }
    }
    cells
}

pub fn sample_error<R: Rng + ?Sized>(law: ErrorLaw, rng: &mut R) -> f64 {
    match law {
        ErrorLaw::StdNormal => rng.sample(StandardNormal),
        ErrorLaw::StudentT3 => {
            let z: f64 = rng.sample(StandardNormal);
            let v: f64 = ChiSquared::new(3.0).expect("valid degrees of freedom").sample(rng);
            z / (v / 3.0).sqrt()
        }
    }
}

pub fn model1_response(x1: f64, x2: f64, e: f64) -> f64 {
    (2.0 * x1).sin() + 2.0 * (-16.0 * x2 * x2).exp() + 0.5 * e
}

pub fn model2_response(x1: f64, x2: f64, e: f64) -> f64 {
    1.0 + x1.sin()
        + (0.5 * x1 * x1 - x1 * x2 + 0.2 * x2 * x2).exp()
        + ((1.0 + 0.2 * (x1 + x2)) / 5.0).abs() * e
}

pub fn gen_model1(n: usize, error: ErrorLaw, seed: u64) -> Vec<(Vec<f64>, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cov = Normal::new(0.0, 0.5).expect("valid normal");
    (0..n)
        .map(|_| {
            let x1 = cov.sample(&mut rng);
            let x2 = cov.sample(&mut rng);
            let e = sample_error(error, &mut rng);
            (vec![x1, x2], model1_response(x1, x2, e))
        })
        .collect()
}

pub fn gen_model2(n: usize, error: ErrorLaw, seed: u64) -> Vec<(Vec<f64>, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unif = Uniform::new(-1.0, 1.0).expect("valid uniform");
    (0..n)
        .map(|_| {
            let x1 = unif.sample(&mut rng);
            let x2: f64 = rng.sample(StandardNormal);
            let e = sample_error(error, &mut rng);
            (vec![x1, x2], model2_response(x1, x2, e))
        })
        .collect()
}

pub fn gen_model(model: Model, n: usize, error: ErrorLaw, seed: u64) -> Vec<(Vec<f64>, f64)> {
    match model {
        Model::Model1 => gen_model1(n, error, seed),
        Model::Model2 => gen_model2(n, error, seed),
    }
}

/// Generates a scenario with its tabulated censoring bounds.
pub fn gen_scenario(spec: &ScenarioSpec) -> Result<Vec<CensoredObservation>> {
    gen_scenario_with(spec, &spec.sampler()?)
}

/// Generates the scenario's `(x, y)` draws but censors them with `sampler`.
pub fn gen_scenario_with(spec: &ScenarioSpec, sampler: &BoundSampler) -> Result<Vec<CensoredObservation>> {
    if spec.n == 0 {
        return Err(Error::domain("scenario needs at least one observation"));
    }
    let data = gen_model(spec.model, spec.n, spec.error, derive_seed(spec.seed, 0));
    Ok(inject_censoring(&data, sampler, derive_seed(spec.seed, 1))?.observations)
}

/// Seeded shuffle, then the first `ceil(fraction * n)` items form the
/// training part.
pub fn train_test_split<I: Clone>(items: &[I], fraction: f64, seed: u64) -> Result<(Vec<I>, Vec<I>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::domain(format!("split fraction {fraction} outside (0, 1)")));
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = ((fraction * items.len() as f64).ceil() as usize).min(items.len());
    let train = order[..n_train].iter().map(|&i| items[i].clone()).collect();
    let test = order[n_train..].iter().map(|&i| items[i].clone()).collect();
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::censor::{censoring_rate, feasible_set};

    fn mean_sd(v: &[f64]) -> (f64, f64) {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
        (m, var.sqrt())
    }

    #[test]
    fn model_plug_in_values() {
        assert_eq!(model1_response(0.0, 0.0, 0.0), 2.0);
        assert!((model1_response(std::f64::consts::FRAC_PI_4, 0.0, 0.0) - 3.0).abs() < 1e-15);
        assert_eq!(model2_response(0.0, 0.0, 0.0), 2.0);
        assert!((model2_response(0.0, 0.0, 1.0) - 2.2).abs() < 1e-15);
    }

    #[test]
    fn model1_covariate_law() {
        let data = gen_model1(100_000, ErrorLaw::StdNormal, 1);
        let x1: Vec<f64> = data.iter().map(|(x, _)| x[0]).collect();
        let (m, sd) = mean_sd(&x1);
        assert!(m.abs() < 0.01, "mean {m}");
        assert!((sd - 0.5).abs() < 0.01, "sd {sd}");
    }

    #[test]
    fn model2_covariate_law() {
        let data = gen_model2(100_000, ErrorLaw::StdNormal, 2);
        let x1: Vec<f64> = data.iter().map(|(x, _)| x[0]).collect();
        assert!(x1.iter().all(|&v| (-1.0..=1.0).contains(&v)));
        assert!(mean_sd(&x1).0.abs() < 0.01);
        let x2: Vec<f64> = data.iter().map(|(x, _)| x[1]).collect();
        let (m2, sd2) = mean_sd(&x2);
        assert!(m2.abs() < 0.02 && (sd2 - 1.0).abs() < 0.02);
    }

    #[test]
    fn error_law_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z: Vec<f64> = (0..100_000).map(|_| sample_error(ErrorLaw::StdNormal, &mut rng)).collect();
        assert!((mean_sd(&z).1.powi(2) - 1.0).abs() < 0.03);
        let mut t: Vec<f64> = (0..100_000).map(|_| sample_error(ErrorLaw::StudentT3, &mut rng)).collect();
        t.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = 0.5 * (t[49_999] + t[50_000]);
        assert!(median.abs() < 0.02, "median {median}");
        // t(3) has variance 3 and heavy tails: P(|T| > 3) = 0.0577.
        let tail = t.iter().filter(|v| v.abs() > 3.0).count() as f64 / t.len() as f64;
        assert!((tail - 0.0577).abs() < 0.005, "tail {tail}");
    }

    #[test]
    fn error_draws_are_seeded() {
        let a: Vec<f64> = {
            let mut r = ChaCha8Rng::seed_from_u64(11);
            (0..10).map(|_| sample_error(ErrorLaw::StudentT3, &mut r)).collect()
        };
        let b: Vec<f64> = {
            let mut r = ChaCha8Rng::seed_from_u64(11);
            (0..10).map(|_| sample_error(ErrorLaw::StudentT3, &mut r)).collect()
        };
        assert_eq!(a, b);
        assert_eq!(gen_model2(20, ErrorLaw::StdNormal, 4), gen_model2(20, ErrorLaw::StdNormal, 4));
    }

    fn scenario(model: Model, kind: CensorType, rate: CensorRate, n: usize) -> ScenarioSpec {
        ScenarioSpec { model, error: ErrorLaw::StdNormal, censor_kind: kind, rate, n, seed: 17 }
    }

    #[test]
    fn scenario_rates_match_independent_simulation() {
        // Reference rates from an independent Monte Carlo of the same cells
        // (2e5 draws each); the nominal 25% cells land well above 25%.
        let cases = [
            (Model::Model1, CensorType::Right, CensorRate::P25, 0.372),
            (Model::Model1, CensorType::Left, CensorRate::P50, 0.489),
            (Model::Model2, CensorType::Interval, CensorRate::P25, 0.269),
        ];
        for (model, kind, rate, expected) in cases {
            let obs = gen_scenario(&scenario(model, kind, rate, 5000)).unwrap();
            let got = censoring_rate(&obs);
            assert!((got - expected).abs() < 0.03, "{model:?} {kind:?} {rate:?}: {got} vs {expected}");
        }
    }

    #[test]
    fn forced_bounds_give_extreme_rates() {
        let spec = scenario(Model::Model2, CensorType::Left, CensorRate::P25, 300);
        let never = BoundSampler::Left(BoundDist::Constant { value: -1e9 });
        let always = BoundSampler::Left(BoundDist::Constant { value: 1e9 });
        assert_eq!(censoring_rate(&gen_scenario_with(&spec, &never).unwrap()), 0.0);
        assert_eq!(censoring_rate(&gen_scenario_with(&spec, &always).unwrap()), 1.0);
    }

    #[test]
    fn scenario_keeps_latent_response_consistent() {
        for (model, error, kind, rate) in table1_cells() {
            let spec = ScenarioSpec { model, error, censor_kind: kind, rate, n: 500, seed: 5 };
            for obs in gen_scenario(&spec).unwrap() {
                let y = obs.y_true.unwrap();
                if obs.is_censored() {
                    assert!(feasible_set(&obs).contains(y));
                } else {
                    assert_eq!(obs.t, y);
                }
            }
        }
        assert_eq!(table1_cells().len(), 24);
    }

    #[test]
    fn scenario_is_seeded() {
        let spec = scenario(Model::Model1, CensorType::Interval, CensorRate::P50, 100);
        assert_eq!(gen_scenario(&spec).unwrap(), gen_scenario(&spec).unwrap());
        let other = ScenarioSpec { seed: 18, ..spec };
        assert_ne!(gen_scenario(&spec).unwrap(), gen_scenario(&other).unwrap());
    }

    #[test]
    fn scenario_rejects_uncensored_kind() {
        let spec = scenario(Model::Model1, CensorType::Uncensored, CensorRate::P25, 10);
        assert!(gen_scenario(&spec).is_err());
        assert_eq!(
            ScenarioSpec { censor_kind: CensorType::Left, ..spec }.id(),
            "model1-normal-left-25"
        );
    }

    #[test]
    fn split_sizes_and_partition() {
        let items: Vec<usize> = (0..1000).collect();
        let (train, test) = train_test_split(&items, 0.8, 3).unwrap();
        assert_eq!((train.len(), test.len()), (800, 200));
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, items);
        assert_eq!(train_test_split(&items, 0.8, 3).unwrap(), (train, test));
        let (tr, te) = train_test_split(&items[..7], 0.5, 1).unwrap();
        assert_eq!((tr.len(), te.len()), (4, 3));
        assert!(train_test_split(&items, 1.0, 0).is_err());
        assert!(train_test_split(&items, 0.0, 0).is_err());
    }
}
