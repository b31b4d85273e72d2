use std::path::PathBuf;

/// Errors produced by the estimators, generators and readers in this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid tick: {0}")]
    InvalidTick(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("input not sorted by time: tick {index} precedes its predecessor")]
    Unsorted { index: usize },

    #[error("empty window")]
    EmptyWindow,

    #[error("pairing error: sequences have lengths {left} and {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("coefficient of variation undefined: mean is zero")]
    UndefinedCv,

    #[error("degenerate window: {0}")]
    DegenerateWindow(String),

    #[error("no tick in the window has a resolvable past price ({unresolved} unresolved)")]
    EmptyLaggedWindow { unresolved: usize },

    #[error("incomplete composite spec: {0}")]
    IncompleteSpec(String),

    #[error("invalid correlation: {0}")]
    InvalidCorrelation(String),

    #[error("covariance matrix is not positive semidefinite (pivot {pivot})")]
    NotPositiveSemidefinite { pivot: usize },

    #[error("invalid statistics: {0}")]
    InvalidStats(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("correlation {target} not attainable for these marginals; attainable range [{min}, {max}]")]
    InfeasibleCorrelation { target: f64, min: f64, max: f64 },

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("no ticks")]
    NoTicks,

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors that describe numeric degeneracy of otherwise valid data
    /// (zero means, empty lagged windows, singular weights).
    pub fn is_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::UndefinedCv | Error::DegenerateWindow(_) | Error::EmptyLaggedWindow { .. }
        )
    }
}
