use flatlab_arith::ArithError;
use flatlab_core::FlatError;
use flatlab_rig::RigError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("t = {t}: {excluded} of {total} samples excluded, above the 5% limit")]
    TooManyExclusions { t: f64, excluded: usize, total: usize },
    #[error("no reference value for {0}; rerun with a bootstrapped reference")]
    MustBootstrapReference(String),
    #[error("unknown observable {0:?}")]
    UnknownObservable(String),
    #[error(transparent)]
    Core(#[from] FlatError),
    #[error(transparent)]
    Rig(#[from] RigError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
