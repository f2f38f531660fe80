// `!(a < b)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod censor;
pub mod cli;
pub mod daernn;
pub mod error;
pub mod expectile;
pub mod harness;
pub mod io;
pub mod nn;
pub mod scalar;
pub mod seed;
pub mod simgen;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision observation record.
pub type Observation = censor::CensoredObservation<f64>;
pub type Observation32 = censor::CensoredObservation<f32>;
pub type Mlp64 = nn::MlpParams<f64>;
pub type Mlp32 = nn::MlpParams<f32>;
pub type PredictionSet64 = daernn::ExpectilePredictionSet<f64>;
pub type PredictionSet32 = daernn::ExpectilePredictionSet<f32>;
pub type DaernnConfig64 = daernn::DaernnConfig<f64>;
pub type DaernnConfig32 = daernn::DaernnConfig<f32>;
