//! Censored observations, their feasible sets, and censoring injection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Censoring code `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CensorType {
    Uncensored = 0,
    Right = 1,
    Left = 2,
    Interval = 3,
}

impl CensorType {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(Self::Uncensored),
            1 => Ok(Self::Right),
            2 => Ok(Self::Left),
            3 => Ok(Self::Interval),
            other => Err(Error::domain(format!("unknown censoring code {other}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Uncensored => "uncensored",
            Self::Right => "right",
            Self::Left => "left",
            Self::Interval => "interval",
        }
    }
}

impl std::str::FromStr for CensorType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "uncensored" | "0" => Ok(Self::Uncensored),
            "right" | "1" => Ok(Self::Right),
            "left" | "2" => Ok(Self::Left),
            "interval" | "3" => Ok(Self::Interval),
            other => Err(Error::domain(format!("unknown censoring type `{other}`"))),
        }
    }
}

/// One training record `(x, t, delta, L, R)`, optionally carrying the latent
/// response for simulation studies.
#[derive(Debug, Clone, PartialEq)]
pub struct CensoredObservation<T: Scalar = f64> {
    pub x: Vec<T>,
    pub t: T,
    pub delta: CensorType,
    pub lower: Option<T>,
    pub upper: Option<T>,
    /// The latent response. Never read by estimators.
    pub y_true: Option<T>,
}

impl<T: Scalar> CensoredObservation<T> {
    /// Validating constructor: bounds must be present exactly as `delta`
    /// requires and, for interval censoring, satisfy `L < R` with `t` inside.
    pub fn new(
        x: Vec<T>,
        t: T,
        delta: CensorType,
        lower: Option<T>,
        upper: Option<T>,
        y_true: Option<T>,
    ) -> Result<Self> {
        let obs = Self { x, t, delta, lower, upper, y_true };
        obs.validate()?;
        Ok(obs)
    }

    pub fn uncensored(x: Vec<T>, y: T) -> Self {
        Self { x, t: y, delta: CensorType::Uncensored, lower: None, upper: None, y_true: Some(y) }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: T, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::domain(format!("non-finite {what} {v}")))
            }
        };
        finite(self.t, "observed response")?;
        if let Some(v) = self.x.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite covariate {v}")));
        }
        match (self.delta, self.lower, self.upper) {
            (CensorType::Uncensored, None, None) => {}
            (CensorType::Right, None, Some(r)) => finite(r, "right bound")?,
            (CensorType::Left, Some(l), None) => finite(l, "left bound")?,
            (CensorType::Interval, Some(l), Some(r)) => {
                finite(l, "left bound")?;
                finite(r, "right bound")?;
                if !(l < r) {
                    return Err(Error::domain(format!("interval bounds need L < R, got ({l}, {r})")));
                }
                if !(self.t >= l && self.t <= r) {
                    return Err(Error::domain(format!(
                        "interval-censored t = {} outside [{l}, {r}]",
                        self.t
                    )));
                }
            }
            (delta, l, r) => {
                return Err(Error::domain(format!(
                    "censoring type {} with bounds L = {:?}, R = {:?}",
                    delta.name(),
                    l,
                    r
                )))
            }
        }
        Ok(())
    }

    pub fn is_censored(&self) -> bool {
        self.delta != CensorType::Uncensored
    }

    pub fn cast<U: Scalar>(&self) -> CensoredObservation<U> {
        let c = |v: T| U::lit(v.as_f64());
        CensoredObservation {
            x: self.x.iter().map(|&v| c(v)).collect(),
            t: c(self.t),
            delta: self.delta,
            lower: self.lower.map(c),
            upper: self.upper.map(c),
            y_true: self.y_true.map(c),
        }
    }
}

/// The set of values the latent response may take. All censored variants
/// are open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeasibleSet<T: Scalar = f64> {
    Point(T),
    /// `(R, inf)`
    AboveR(T),
    /// `(-inf, L)`
    BelowL(T),
    /// `(L, R)`
    Between(T, T),
}

impl<T: Scalar> FeasibleSet<T> {
    pub fn contains(&self, v: T) -> bool {
        match *self {
            FeasibleSet::Point(y) => v == y,
            FeasibleSet::AboveR(r) => v > r,
            FeasibleSet::BelowL(l) => v < l,
            FeasibleSet::Between(l, r) => v > l && v < r,
        }
    }

    /// Membership in the closure of the set.
    pub fn closure_contains(&self, v: T) -> bool {
        match *self {
            FeasibleSet::Point(y) => v == y,
            FeasibleSet::AboveR(r) => v >= r,
            FeasibleSet::BelowL(l) => v <= l,
            FeasibleSet::Between(l, r) => v >= l && v <= r,
        }
    }
}

pub fn contains<T: Scalar>(set: &FeasibleSet<T>, v: T) -> bool {
    set.contains(v)
}

pub fn feasible_set<T: Scalar>(obs: &CensoredObservation<T>) -> FeasibleSet<T> {
    match obs.delta {
        CensorType::Uncensored => FeasibleSet::Point(obs.t),
        CensorType::Right => FeasibleSet::AboveR(obs.upper.expect("right bound")),
        CensorType::Left => FeasibleSet::BelowL(obs.lower.expect("left bound")),
        CensorType::Interval => {
            FeasibleSet::Between(obs.lower.expect("left bound"), obs.upper.expect("right bound"))
        }
    }
}

/// Fallback imputation value: `R`, `L` or `(L + R) / 2`.
pub fn boundary_value<T: Scalar>(obs: &CensoredObservation<T>) -> Result<T> {
    match (obs.delta, obs.lower, obs.upper) {
        (CensorType::Uncensored, ..) => {
            Err(Error::domain("uncensored observation has no censoring boundary"))
        }
        (CensorType::Right, _, Some(r)) => Ok(r),
        (CensorType::Left, Some(l), _) => Ok(l),
        (CensorType::Interval, Some(l), Some(r)) => Ok(midpoint(l, r)),
        _ => Err(Error::domain("censored observation is missing its bounds")),
    }
}

fn midpoint<T: Scalar>(l: T, r: T) -> T {
    (l + r) / T::lit(2.0)
}

/// Censoring bounds drawn for one observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CensorScheme<T: Scalar = f64> {
    Right { upper: T },
    Left { lower: T },
    Interval { lower: T, upper: T },
}

/// The record produced by censoring one latent response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Censored<T: Scalar = f64> {
    pub t: T,
    pub delta: CensorType,
    pub lower: Option<T>,
    pub upper: Option<T>,
}

/// Censors a latent response `y`.
///
/// * right at `R`: `t = min(y, R)`, censored iff `y > R`;
/// * left at `L`: `t = max(y, L)`, censored iff `y < L`;
/// * interval `(L, R)`: censored iff `L < y < R`, when only the interval is
///   known and `t` is its midpoint; otherwise `t = y`, uncensored.
///
/// Uncensored outcomes record no bounds.
pub fn apply_censoring<T: Scalar>(y: T, scheme: &CensorScheme<T>) -> Result<Censored<T>> {
    let plain = Censored { t: y, delta: CensorType::Uncensored, lower: None, upper: None };
    Ok(match *scheme {
        CensorScheme::Right { upper } => {
            if y > upper {
                Censored { t: upper, delta: CensorType::Right, lower: None, upper: Some(upper) }
            } else {
                plain
            }
        }
        CensorScheme::Left { lower } => {
            if y < lower {
                Censored { t: lower, delta: CensorType::Left, lower: Some(lower), upper: None }
            } else {
                plain
            }
        }
        CensorScheme::Interval { lower, upper } => {
            if !(lower < upper) {
                return Err(Error::domain(format!(
                    "interval censoring needs L < R, got ({lower}, {upper})"
                )));
            }
            if y > lower && y < upper {
                Censored {
                    t: midpoint(lower, upper),
                    delta: CensorType::Interval,
                    lower: Some(lower),
                    upper: Some(upper),
                }
            } else {
                plain
            }
        }
    })
}

/// Censors `y` under `scheme` and packages the observation with its latent
/// response retained.
pub fn censor_observation<T: Scalar>(
    x: Vec<T>,
    y: T,
    scheme: &CensorScheme<T>,
) -> Result<CensoredObservation<T>> {
    let c = apply_censoring(y, scheme)?;
    CensoredObservation::new(x, c.t, c.delta, c.lower, c.upper, Some(y))
}

/// A univariate distribution for censoring bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "lowercase")]
pub enum BoundDist {
    Normal { mean: f64, sd: f64 },
    /// Parameterised by its mean (`1 / rate`).
    Exponential { mean: f64 },
    Constant { value: f64 },
}

impl BoundDist {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let v = match *self {
            BoundDist::Normal { mean, sd } => Normal::new(mean, sd)
                .map_err(|e| Error::domain(format!("normal bound distribution: {e}")))?
                .sample(rng),
            BoundDist::Exponential { mean } => {
                if !(mean > 0.0) {
                    return Err(Error::domain(format!("exponential mean {mean} must be positive")));
                }
                Exp::new(1.0 / mean)
                    .map_err(|e| Error::domain(format!("exponential bound distribution: {e}")))?
                    .sample(rng)
            }
            BoundDist::Constant { value } => value,
        };
        if !v.is_finite() {
            return Err(Error::domain(format!("bound sampler produced {v}")));
        }
        Ok(v)
    }
}

impl std::fmt::Display for BoundDist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundDist::Normal { mean, sd } => write!(f, "normal:{mean}:{sd}"),
            BoundDist::Exponential { mean } => write!(f, "exp:{mean}"),
            BoundDist::Constant { value } => write!(f, "const:{value}"),
        }
    }
}

impl std::str::FromStr for BoundDist {
    type Err = Error;

    /// `normal:MEAN:SD`, `exp:MEAN` or `const:VALUE`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number `{p}` in bound distribution `{s}`")))
        };
        match parts.as_slice() {
            ["normal", m, sd] => Ok(BoundDist::Normal { mean: num(m)?, sd: num(sd)? }),
            ["exp", m] => Ok(BoundDist::Exponential { mean: num(m)? }),
            ["const", v] => Ok(BoundDist::Constant { value: num(v)? }),
            _ => Err(Error::Config(format!(
                "bound distribution `{s}` is not normal:MEAN:SD, exp:MEAN or const:VALUE"
            ))),
        }
    }
}

/// How bounds are drawn for [`inject_censoring`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundSampler {
    Right(BoundDist),
    Left(BoundDist),
    /// Independent `L` and `R` draws, redrawn as a pair until `L < R`.
    Interval { lower: BoundDist, upper: BoundDist },
}

const MAX_INTERVAL_REDRAWS: usize = 10_000;

impl BoundSampler {
    pub fn kind(&self) -> CensorType {
        match self {
            BoundSampler::Right(_) => CensorType::Right,
            BoundSampler::Left(_) => CensorType::Left,
            BoundSampler::Interval { .. } => CensorType::Interval,
        }
    }

    pub fn build(kind: CensorType, lower: Option<BoundDist>, upper: Option<BoundDist>) -> Result<Self> {
        match (kind, lower, upper) {
            (CensorType::Right, _, Some(u)) => Ok(BoundSampler::Right(u)),
            (CensorType::Left, Some(l), _) => Ok(BoundSampler::Left(l)),
            (CensorType::Interval, Some(l), Some(u)) => Ok(BoundSampler::Interval { lower: l, upper: u }),
            (CensorType::Uncensored, ..) => Err(Error::domain("cannot inject uncensored censoring")),
            (k, ..) => Err(Error::Config(format!("{} censoring is missing a bound distribution", k.name()))),
        }
    }

    pub fn draw<T: Scalar, R: Rng + ?Sized>(&self, rng: &mut R) -> Result<CensorScheme<T>> {
        Ok(match self {
            BoundSampler::Right(d) => CensorScheme::Right { upper: T::lit(d.sample(rng)?) },
            BoundSampler::Left(d) => CensorScheme::Left { lower: T::lit(d.sample(rng)?) },
            BoundSampler::Interval { lower, upper } => {
                for _ in 0..MAX_INTERVAL_REDRAWS {
                    let l = T::lit(lower.sample(rng)?);
                    let r = T::lit(upper.sample(rng)?);
                    if l < r {
                        return Ok(CensorScheme::Interval { lower: l, upper: r });
                    }
                }
                return Err(Error::domain(format!(
                    "no interval with L < R after {MAX_INTERVAL_REDRAWS} redraws"
                )));
            }
        })
    }
}

/// Censored dataset plus the realised fraction of censored records.
#[derive(Debug, Clone, PartialEq)]
pub struct Injected<T: Scalar = f64> {
    pub observations: Vec<CensoredObservation<T>>,
    pub achieved_rate: f64,
}

/// Artificially censors a fully observed dataset. Bounds are drawn per
/// observation, in order, from a stream seeded by `seed`; the original
/// response is kept as `y_true`.
pub fn inject_censoring<T: Scalar, X: AsRef<[T]>>(
    data: &[(X, T)],
    sampler: &BoundSampler,
    seed: u64,
) -> Result<Injected<T>> {
    if data.is_empty() {
        return Err(Error::domain("cannot censor an empty dataset"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let observations = data
        .iter()
        .map(|(x, y)| {
            let scheme = sampler.draw(&mut rng)?;
            censor_observation(x.as_ref().to_vec(), *y, &scheme)
        })
        .collect::<Result<Vec<_>>>()?;
    let achieved_rate = censoring_rate(&observations);
    Ok(Injected { observations, achieved_rate })
}

/// Fraction of observations with `delta != 0`.
pub fn censoring_rate<T: Scalar>(obs: &[CensoredObservation<T>]) -> f64 {
    if obs.is_empty() {
        return 0.0;
    }
    obs.iter().filter(|o| o.is_censored()).count() as f64 / obs.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn codes_round_trip() {
        for c in 0..4u8 {
            assert_eq!(CensorType::from_code(c).unwrap().code(), c);
        }
        assert!(CensorType::from_code(4).is_err());
        assert_eq!("Interval".parse::<CensorType>().unwrap(), CensorType::Interval);
    }

    #[test]
    fn apply_censoring_examples() {
        let r = apply_censoring(2.0, &CensorScheme::Right { upper: 1.5 }).unwrap();
        assert_eq!((r.t, r.delta), (1.5, CensorType::Right));
        let l = apply_censoring(2.0, &CensorScheme::Left { lower: 1.5 }).unwrap();
        assert_eq!((l.t, l.delta), (2.0, CensorType::Uncensored));
        assert_eq!((l.lower, l.upper), (None, None));
        let i = apply_censoring(0.5, &CensorScheme::Interval { lower: 0.0, upper: 1.0 }).unwrap();
        assert_eq!((i.t, i.delta), (0.5, CensorType::Interval));
        let obs = censor_observation(vec![], 0.5, &CensorScheme::Interval { lower: 0.0, upper: 1.0 }).unwrap();
        assert_eq!(feasible_set(&obs), FeasibleSet::Between(0.0, 1.0));
    }

    #[test]
    fn interval_outside_is_uncensored() {
        let c = apply_censoring(1.7, &CensorScheme::Interval { lower: 0.0, upper: 1.0 }).unwrap();
        assert_eq!((c.t, c.delta), (1.7, CensorType::Uncensored));
        assert!(apply_censoring(0.5, &CensorScheme::Interval { lower: 1.0, upper: 1.0 }).is_err());
        assert!(apply_censoring(0.5, &CensorScheme::Interval { lower: 2.0, upper: 1.0 }).is_err());
    }

    #[test]
    fn ties_at_bounds_are_uncensored() {
        let r = apply_censoring(1.5, &CensorScheme::Right { upper: 1.5 }).unwrap();
        assert_eq!(r.delta, CensorType::Uncensored);
        let l = apply_censoring(1.5, &CensorScheme::Left { lower: 1.5 }).unwrap();
        assert_eq!(l.delta, CensorType::Uncensored);
    }

    #[test]
    fn feasible_set_examples() {
        let point = CensoredObservation::new(vec![1.0], 3.2, CensorType::Uncensored, None, None, None).unwrap();
        assert_eq!(feasible_set(&point), FeasibleSet::Point(3.2));
        let right = CensoredObservation::new(vec![1.0], 1.5, CensorType::Right, None, Some(1.5), None).unwrap();
        assert_eq!(feasible_set(&right), FeasibleSet::AboveR(1.5));
        let left = CensoredObservation::new(vec![1.0], -0.3, CensorType::Left, Some(-0.3), None, None).unwrap();
        assert_eq!(feasible_set(&left), FeasibleSet::BelowL(-0.3));
    }

    #[test]
    fn contains_examples() {
        assert!(!contains(&FeasibleSet::AboveR(1.5), 1.5));
        assert!(contains(&FeasibleSet::AboveR(1.5), 1.6));
        assert!(contains(&FeasibleSet::Between(0.0, 1.0), 0.5));
        assert!(!contains(&FeasibleSet::Between(0.0, 1.0), 1.0));
        assert!(contains(&FeasibleSet::BelowL(0.0), -1e-9));
        assert!(contains(&FeasibleSet::Point(2.0), 2.0));
        assert!(!contains(&FeasibleSet::Point(2.0), 2.0 + 1e-12));
    }

    #[test]
    fn boundary_value_examples() {
        let right = CensoredObservation::new(vec![], 1.5, CensorType::Right, None, Some(1.5), None).unwrap();
        assert_eq!(boundary_value(&right).unwrap(), 1.5);
        let left = CensoredObservation::new(vec![], -0.3, CensorType::Left, Some(-0.3), None, None).unwrap();
        assert_eq!(boundary_value(&left).unwrap(), -0.3);
        let int = CensoredObservation::new(vec![], 0.5, CensorType::Interval, Some(0.0), Some(1.0), None).unwrap();
        assert_eq!(boundary_value(&int).unwrap(), 0.5);
        let none = CensoredObservation::uncensored(vec![], 1.0);
        assert!(boundary_value(&none).is_err());
    }

    #[test]
    fn constructor_enforces_bound_shape() {
        assert!(CensoredObservation::new(vec![], 1.0, CensorType::Right, None, None, None).is_err());
        assert!(CensoredObservation::new(vec![], 1.0, CensorType::Uncensored, Some(0.0), None, None).is_err());
        assert!(CensoredObservation::new(vec![], 1.0, CensorType::Left, Some(1.0), Some(2.0), None).is_err());
        assert!(CensoredObservation::new(vec![], 1.0, CensorType::Interval, Some(2.0), Some(1.0), None).is_err());
        assert!(CensoredObservation::new(vec![], 3.0, CensorType::Interval, Some(0.0), Some(1.0), None).is_err());
        assert!(CensoredObservation::new(vec![f64::NAN], 1.0, CensorType::Uncensored, None, None, None).is_err());
    }

    fn xs(n: usize) -> Vec<(Vec<f64>, f64)> {
        (0..n).map(|i| (vec![i as f64], (i as f64 / 7.0).sin())).collect()
    }

    #[test]
    fn inject_extreme_bounds() {
        let data = xs(200);
        let never = BoundSampler::Right(BoundDist::Constant { value: 1e9 });
        assert_eq!(inject_censoring(&data, &never, 1).unwrap().achieved_rate, 0.0);
        let always = BoundSampler::Right(BoundDist::Constant { value: -1e9 });
        let out = inject_censoring(&data, &always, 1).unwrap();
        assert_eq!(out.achieved_rate, 1.0);
        assert!(out.observations.iter().all(|o| o.t == -1e9));
    }

    #[test]
    fn inject_matches_independent_rate_estimate() {
        // Model 1 covariates and responses with R ~ N(1.4, 2^2). The realised
        // rate under this reading is ~0.372 (independent Monte Carlo with
        // 2e5 draws), not the nominal 0.25.
        let data = crate::simgen::gen_model1(1000, crate::simgen::ErrorLaw::StdNormal, 99);
        let sampler = BoundSampler::Right(BoundDist::Normal { mean: 1.4, sd: 2.0 });
        let out = inject_censoring(&data, &sampler, 5).unwrap();
        assert!((out.achieved_rate - 0.372).abs() < 0.05, "rate {}", out.achieved_rate);
    }

    #[test]
    fn inject_rejects_degenerate_input() {
        let empty: Vec<(Vec<f64>, f64)> = vec![];
        let s = BoundSampler::Right(BoundDist::Constant { value: 0.0 });
        assert!(inject_censoring(&empty, &s, 0).is_err());
        let nan = BoundSampler::Left(BoundDist::Constant { value: f64::NAN });
        assert!(inject_censoring(&xs(3), &nan, 0).is_err());
        let bad = BoundSampler::Interval {
            lower: BoundDist::Constant { value: 1.0 },
            upper: BoundDist::Constant { value: 0.0 },
        };
        assert!(inject_censoring(&xs(3), &bad, 0).is_err());
    }

    #[test]
    fn bound_dist_parsing() {
        assert_eq!("normal:1.4:2".parse::<BoundDist>().unwrap(), BoundDist::Normal { mean: 1.4, sd: 2.0 });
        assert_eq!("exp:4".parse::<BoundDist>().unwrap(), BoundDist::Exponential { mean: 4.0 });
        assert!("uniform:0:1".parse::<BoundDist>().is_err());
        let d = BoundDist::Normal { mean: -0.5, sd: 2.0 };
        assert_eq!(d.to_string().parse::<BoundDist>().unwrap(), d);
    }

    proptest! {
        #[test]
        fn censoring_is_consistent(
            y in -10f64..10.0, a in -10f64..10.0, b in -10f64..10.0, which in 0usize..3
        ) {
            let scheme = match which {
                0 => CensorScheme::Right { upper: a },
                1 => CensorScheme::Left { lower: a },
                _ => {
                    prop_assume!(a < b);
                    CensorScheme::Interval { lower: a, upper: b }
                }
            };
            let obs = censor_observation(vec![0.0], y, &scheme).unwrap();
            let set = feasible_set(&obs);
            if obs.is_censored() {
                prop_assert!(set.contains(y));
                let b = boundary_value(&obs).unwrap();
                prop_assert!(set.closure_contains(b));
            } else {
                prop_assert_eq!(obs.t, y);
            }
            match scheme {
                CensorScheme::Right { .. } => prop_assert!(obs.t <= y),
                CensorScheme::Left { .. } => prop_assert!(obs.t >= y),
                _ => {}
            }
        }

        #[test]
        fn injection_rate_is_exact_and_seeded(seed in 0u64..1000) {
            let data = xs(50);
            let s = BoundSampler::Interval {
                lower: BoundDist::Normal { mean: -0.5, sd: 1.0 },
                upper: BoundDist::Normal { mean: 0.5, sd: 1.0 },
            };
            let a = inject_censoring(&data, &s, seed).unwrap();
            let b = inject_censoring(&data, &s, seed).unwrap();
            prop_assert_eq!(&a, &b);
            let count = a.observations.iter().filter(|o| o.delta != CensorType::Uncensored).count();
            prop_assert_eq!(a.achieved_rate, count as f64 / 50.0);
        }
    }
}
