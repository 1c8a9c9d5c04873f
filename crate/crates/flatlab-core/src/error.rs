use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlatError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed surface: {0}")]
    MalformedSurface(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("not horizontally periodic: separatrix from vertex {vertex} exceeded length {bound}")]
    NotHorizontallyPeriodic { vertex: usize, bound: f64 },
    #[error("degenerate direction: {0}")]
    DegenerateDirection(String),
    #[error("no saddle connection shorter than {0}")]
    NoSaddleConnection(f64),
    #[error("class outside the chart: norm {0} >= 1/2")]
    OutOfChart(f64),
    #[error("chart failure: {0}")]
    ChartFailure(String),
    #[error("matrix is not in the Veech group")]
    NotInVeechGroup,
    #[error("no return to the orbit: {0}")]
    NoReturn(String),
    #[error("numeric instability: {0}")]
    NumericInstability(String),
    #[error("basis mismatch: class fingerprint {found}, surface fingerprint {expected}")]
    BasisMismatch { expected: String, found: String },
}

pub type Result<T> = std::result::Result<T, FlatError>;
