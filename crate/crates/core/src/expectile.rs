//! The expectile check loss, its derivative, unconditional expectiles and the
//! level grid used for imputation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An expectile level in the open interval `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ExpectileLevel<T: Scalar = f64>(T);

impl<T: Scalar> ExpectileLevel<T> {
    pub fn new(tau: T) -> Result<Self> {
        if tau > T::zero() && tau < T::one() {
            Ok(Self(tau))
        } else {
            Err(Error::domain(format!("expectile level {tau} outside (0, 1)")))
        }
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }

    pub fn cast<U: Scalar>(self) -> ExpectileLevel<U> {
        ExpectileLevel(U::lit(self.0.as_f64()))
    }
}

impl<T: Scalar> TryFrom<f64> for ExpectileLevel<T> {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(T::lit(v))
    }
}

impl<T: Scalar> From<ExpectileLevel<T>> for f64 {
    fn from(level: ExpectileLevel<T>) -> f64 {
        level.0.as_f64()
    }
}

/// The imputation grid `k / (m + 1)`, `k = 1..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelGrid<T: Scalar = f64> {
    levels: Vec<ExpectileLevel<T>>,
}

impl<T: Scalar> LevelGrid<T> {
    pub fn m(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[ExpectileLevel<T>] {
        &self.levels
    }

    pub fn get(&self, k: usize) -> ExpectileLevel<T> {
        self.levels[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = ExpectileLevel<T>> + '_ {
        self.levels.iter().copied()
    }

    /// Zero-based index of the grid level closest to `tau`; ties go to the
    /// lower level.
    pub fn nearest(&self, tau: ExpectileLevel<T>) -> usize {
        let mut best = 0;
        let mut best_gap = T::infinity();
        for (k, level) in self.levels.iter().enumerate() {
            let gap = (level.value() - tau.value()).abs();
            if gap < best_gap {
                best = k;
                best_gap = gap;
            }
        }
        best
    }
}

/// Asymmetric weight `|tau - 1(u < 0)|`. At `u = 0` the indicator is false.
#[inline]
pub(crate) fn asymmetric_weight<T: Scalar>(u: T, tau: T) -> T {
    if u < T::zero() {
        T::one() - tau
    } else {
        tau
    }
}

#[inline]
pub(crate) fn loss_unchecked<T: Scalar>(u: T, tau: T) -> T {
    T::lit(0.5) * asymmetric_weight(u, tau) * u * u
}

#[inline]
pub(crate) fn grad_unchecked<T: Scalar>(u: T, tau: T) -> T {
    asymmetric_weight(u, tau) * u
}

/// `rho_tau(u) = 0.5 * |tau - 1(u < 0)| * u^2`.
pub fn check_loss<T: Scalar>(u: T, tau: ExpectileLevel<T>) -> Result<T> {
    if !u.is_finite() {
        return Err(Error::domain(format!("check loss of non-finite residual {u}")));
    }
    Ok(loss_unchecked(u, tau.value()))
}

/// Derivative of [`check_loss`] with respect to the residual.
pub fn check_loss_grad<T: Scalar>(u: T, tau: ExpectileLevel<T>) -> Result<T> {
    if !u.is_finite() {
        return Err(Error::domain(format!("check loss gradient of non-finite residual {u}")));
    }
    Ok(grad_unchecked(u, tau.value()))
}

const NEWTON_MAX_ITER: usize = 200;

/// The unconditional `tau`-expectile of a sample: the unique minimiser of
/// `sum_i rho_tau(v_i - theta)`.
///
/// Newton's method on the piecewise-linear first-order condition, started at
/// the mean, with bisection on `[min, max]` if an iterate leaves the bracket
/// or the iteration cap is hit.
pub fn sample_expectile<T: Scalar>(values: &[T], tau: ExpectileLevel<T>) -> Result<T> {
    if values.is_empty() {
        return Err(Error::domain("expectile of an empty sample"));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::domain(format!("expectile of sample containing {v}")));
    }
    let tau = tau.value();
    let (lo, hi) = values
        .iter()
        .fold((values[0], values[0]), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if lo == hi {
        return Ok(lo);
    }
    let scale = lo.abs().max(hi.abs());
    let tol = T::lit(1e-10).max(T::lit(4.0) * T::epsilon() * scale);

    // First-order condition and its (negated) slope at theta.
    let foc = |theta: T| -> (T, T) {
        values.iter().fold((T::zero(), T::zero()), |(f, w_sum), &v| {
            let w = asymmetric_weight(v - theta, tau);
            (f + w * (v - theta), w_sum + w)
        })
    };

    let mean = values.iter().copied().sum::<T>() / T::from_count(values.len());
    let mut theta = mean.max(lo).min(hi);
    for _ in 0..NEWTON_MAX_ITER {
        let (f, w_sum) = foc(theta);
        let next = theta + f / w_sum;
        if !(next >= lo && next <= hi) {
            break;
        }
        if (next - theta).abs() <= tol {
            return Ok(next);
        }
        theta = next;
    }

    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = a + (b - a) / T::lit(2.0);
        if mid <= a || mid >= b {
            break;
        }
        if foc(mid).0 > T::zero() {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(a + (b - a) / T::lit(2.0))
}

/// Levels `k / (m + 1)` for `k = 1..=m`.
pub fn expectile_grid<T: Scalar>(m: usize) -> Result<LevelGrid<T>> {
    if m == 0 {
        return Err(Error::domain("expectile grid size must be at least 1"));
    }
    let denom = T::from_count(m + 1);
    let levels = (1..=m)
        .map(|k| ExpectileLevel::new(T::from_count(k) / denom))
        .collect::<Result<Vec<_>>>()?;
    Ok(LevelGrid { levels })
}

/// `max(floor(sqrt(n)), 99)`.
pub fn default_grid_size(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::domain("default grid size needs at least one sample"));
    }
    Ok(n.isqrt().max(99))
}

/// The nine reporting levels `0.1, 0.2, ..., 0.9`.
pub fn reporting_levels<T: Scalar>() -> Vec<ExpectileLevel<T>> {
    (1..=9)
        .map(|k| ExpectileLevel(T::from_count(k) / T::lit(10.0)))
        .collect()
}
