//! Reference estimators: FULL (censoring ignored), Oracle (latent responses)
//! and DALinear (the augmentation loop around a linear expectile fit).

use crate::censor::CensoredObservation;
use crate::daernn::{run_with, AugmentConfig, ExpectileLearner, ExpectilePredictionSet};
use crate::error::{Error, Result};
use crate::expectile::{loss_unchecked, ExpectileLevel};
use crate::nn::{self, MlpParams, MlpSpec, TrainConfig};
use crate::scalar::Scalar;

/// Trains on every observed `t` as if it were uncensored.
pub fn train_full<T: Scalar>(
    data: &[CensoredObservation<T>],
    spec: &MlpSpec,
    train: &TrainConfig,
    tau: ExpectileLevel<T>,
) -> Result<MlpParams<T>> {
    if data.is_empty() {
        return Err(Error::domain("FULL needs at least one observation"));
    }
    let xs: Vec<&[T]> = data.iter().map(|o| o.x.as_slice()).collect();
    let ys: Vec<T> = data.iter().map(|o| o.t).collect();
    nn::train_mbgd(&xs, &ys, spec, train, tau)
}

/// Trains on the latent responses; simulation only.
pub fn train_oracle<T: Scalar>(
    data: &[CensoredObservation<T>],
    spec: &MlpSpec,
    train: &TrainConfig,
    tau: ExpectileLevel<T>,
) -> Result<MlpParams<T>> {
    if data.is_empty() {
        return Err(Error::domain("Oracle needs at least one observation"));
    }
    let ys = data
        .iter()
        .map(|o| o.y_true.ok_or_else(|| Error::Schema("Oracle requires y_true for every observation".into())))
        .collect::<Result<Vec<T>>>()?;
    let xs: Vec<&[T]> = data.iter().map(|o| o.x.as_slice()).collect();
    nn::train_mbgd(&xs, &ys, spec, train, tau)
}

/// `y = beta[0] + sum_j beta[j + 1] x_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearExpectileModel<T: Scalar = f64> {
    pub beta: Vec<T>,
    pub tau: ExpectileLevel<T>,
}

impl<T: Scalar> LinearExpectileModel<T> {
    pub fn predict_one(&self, x: &[T]) -> Result<T> {
        if x.len() + 1 != self.beta.len() {
            return Err(Error::domain(format!(
                "covariate length {} does not match model dimension {}",
                x.len(),
                self.beta.len() - 1
            )));
        }
        Ok(self.beta[0] + x.iter().zip(&self.beta[1..]).map(|(&a, &b)| a * b).sum::<T>())
    }

    pub fn predict<X: AsRef<[T]>>(&self, xs: &[X]) -> Result<Vec<T>> {
        xs.iter().map(|x| self.predict_one(x.as_ref())).collect()
    }
}

/// A converged IRLS fit and the objective after each pass.
#[derive(Debug, Clone)]
pub struct LinearFit<T: Scalar = f64> {
    pub model: LinearExpectileModel<T>,
    /// `trace[0]` is the objective at the least-squares start.
    pub objective_trace: Vec<T>,
    pub passes: usize,
}

const IRLS_TOL: f64 = 1e-8;
const IRLS_MAX_PASSES: usize = 100;

fn objective<T: Scalar, X: AsRef<[T]>>(xs: &[X], ys: &[T], beta: &[T], tau: T) -> T {
    xs.iter()
        .zip(ys)
        .map(|(x, &y)| {
            let fit = beta[0] + x.as_ref().iter().zip(&beta[1..]).map(|(&a, &b)| a * b).sum::<T>();
            loss_unchecked(y - fit, tau)
        })
        .sum()
}

/// Solves the weighted normal equations `(X'WX) beta = X'Wy`.
fn weighted_least_squares<T: Scalar, X: AsRef<[T]>>(xs: &[X], ys: &[T], w: &[T]) -> Result<Vec<T>> {
    let d = xs[0].as_ref().len() + 1;
    let mut a = vec![T::zero(); d * (d + 1)];
    let mut row = vec![T::one(); d];
    for ((x, &y), &wi) in xs.iter().zip(ys).zip(w) {
        row[1..].copy_from_slice(x.as_ref());
        for r in 0..d {
            let wr = wi * row[r];
            for c in 0..d {
                a[r * (d + 1) + c] += wr * row[c];
            }
            a[r * (d + 1) + d] += wr * y;
        }
    }
    solve_augmented(&mut a, d)
}

/// Gaussian elimination with partial pivoting on a `d x (d + 1)` augmented
/// matrix.
fn solve_augmented<T: Scalar>(a: &mut [T], d: usize) -> Result<Vec<T>> {
    let w = d + 1;
    let scale = (0..d).map(|i| a[i * w + i].abs()).fold(T::zero(), T::max);
    let tol = scale * T::epsilon() * T::from_count(d) * T::lit(16.0);
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&i, &j| a[i * w + col].abs().partial_cmp(&a[j * w + col].abs()).unwrap())
            .unwrap();
        if !(a[pivot * w + col].abs() > tol) {
            return Err(Error::domain("design matrix is rank deficient"));
        }
        if pivot != col {
            for c in 0..w {
                a.swap(pivot * w + c, col * w + c);
            }
        }
        for r in col + 1..d {
            let f = a[r * w + col] / a[col * w + col];
            if f != T::zero() {
                for c in col..w {
                    let v = a[col * w + c];
                    a[r * w + c] -= f * v;
                }
            }
        }
    }
    let mut beta = vec![T::zero(); d];
    for r in (0..d).rev() {
        let mut s = a[r * w + d];
        for c in r + 1..d {
            s -= a[r * w + c] * beta[c];
        }
        beta[r] = s / a[r * w + r];
    }
    Ok(beta)
}

/// Asymmetric least squares by iteratively reweighted least squares.
///
/// Starts from ordinary least squares; each pass refits with weights
/// `|tau - 1(r < 0)|` from the current residuals. A pass whose objective
/// would increase is halved back toward the previous iterate.
pub fn linear_expectile_fit_traced<T: Scalar, X: AsRef<[T]>>(
    xs: &[X],
    ys: &[T],
    tau: ExpectileLevel<T>,
) -> Result<LinearFit<T>> {
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(Error::domain("linear fit needs equally many covariates and targets"));
    }
    let p = xs[0].as_ref().len();
    if xs.iter().any(|x| x.as_ref().len() != p) {
        return Err(Error::domain("covariate vectors differ in length"));
    }
    if ys.iter().any(|y| !y.is_finite()) || xs.iter().any(|x| x.as_ref().iter().any(|v| !v.is_finite())) {
        return Err(Error::domain("linear fit inputs must be finite"));
    }
    let t = tau.value();
    let mut weights = vec![T::one(); ys.len()];
    let mut beta = weighted_least_squares(xs, ys, &weights)?;
    let mut current = objective(xs, ys, &beta, t);
    let mut trace = vec![current];
    let tol = T::lit(IRLS_TOL);
    let mut last_delta = f64::INFINITY;
    for pass in 1..=IRLS_MAX_PASSES {
        for ((w, x), &y) in weights.iter_mut().zip(xs).zip(ys) {
            let fit = beta[0] + x.as_ref().iter().zip(&beta[1..]).map(|(&a, &b)| a * b).sum::<T>();
            *w = crate::expectile::asymmetric_weight(y - fit, t);
        }
        let mut candidate = weighted_least_squares(xs, ys, &weights)?;
        let mut value = objective(xs, ys, &candidate, t);
        let mut halvings = 0;
        while value > current && halvings < 60 {
            for (c, &b) in candidate.iter_mut().zip(&beta) {
                *c = b + (*c - b) * T::lit(0.5);
            }
            value = objective(xs, ys, &candidate, t);
            halvings += 1;
        }
        if value > current {
            candidate.clone_from(&beta);
            value = current;
        }
        let delta = candidate.iter().zip(&beta).map(|(&a, &b)| (a - b).abs()).fold(T::zero(), T::max);
        beta = candidate;
        current = value;
        trace.push(current);
        last_delta = delta.as_f64();
        if delta < tol {
            return Ok(LinearFit { model: LinearExpectileModel { beta, tau }, objective_trace: trace, passes: pass });
        }
    }
    Err(Error::NoConvergence { passes: IRLS_MAX_PASSES, last_delta })
}

pub fn linear_expectile_fit<T: Scalar, X: AsRef<[T]>>(
    xs: &[X],
    ys: &[T],
    tau: ExpectileLevel<T>,
) -> Result<LinearExpectileModel<T>> {
    Ok(linear_expectile_fit_traced(xs, ys, tau)?.model)
}

/// Linear learner for the augmentation loop; ignores seeds and warm starts.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinearLearner;

impl<T: Scalar> ExpectileLearner<T> for LinearLearner {
    type Model = LinearExpectileModel<T>;

    fn fit(
        &self,
        xs: &[Vec<T>],
        ys: &[T],
        tau: ExpectileLevel<T>,
        _seed: u64,
        _warm: Option<&Self::Model>,
    ) -> Result<Self::Model> {
        linear_expectile_fit(xs, ys, tau)
    }

    fn predict(&self, model: &Self::Model, xs: &[Vec<T>]) -> Result<Vec<T>> {
        model.predict(xs)
    }
}

/// The augmentation loop with [`LinearLearner`].
pub fn run_dalinear<T: Scalar>(
    train_data: &[CensoredObservation<T>],
    test_x: &[Vec<T>],
    config: &AugmentConfig<T>,
) -> Result<ExpectilePredictionSet<T>> {
    Ok(run_with(&LinearLearner, train_data, test_x, config, false)?.predictions)
}
