use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("training diverged at epoch {epoch}: loss is {loss}")]
    Diverged { epoch: usize, loss: f64 },

    /// A failure inside one per-level training run of the augmentation loop.
    #[error("iteration {iteration}, level {level} (tau = {tau}): {source}")]
    Level {
        iteration: usize,
        level: usize,
        tau: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("initialization impossible: {0}")]
    Initialization(String),

    #[error("no convergence after {passes} passes (last max |delta beta| = {last_delta:e})")]
    NoConvergence { passes: usize, last_delta: f64 },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures caused by the numerics rather than by inputs or the
    /// environment.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Diverged { .. } | Error::NoConvergence { .. } | Error::Initialization(_) => {
                true
            }
            Error::Level { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
