use thiserror::Error;

/// Errors produced by the simulator core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("register size n={n} outside supported range {min}..={max}")]
    Size { n: usize, min: usize, max: usize },

    #[error("resource cap exceeded: {0}")]
    Resource(String),

    #[error("dimension mismatch: {left} vs {right}")]
    Shape { left: usize, right: usize },

    #[error("qubit site {site} out of range for an {n}-qubit register")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("duplicate qubit site {site}")]
    DuplicateSite { site: usize },

    #[error("basis index {index} out of range (dimension {dim})")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("{what} = {value} out of range {lo}..={hi}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("{0}")]
    Domain(String),

    #[error("noise unitary is not a good noise; operation undefined for this classification")]
    UnsupportedClassification,

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("trace too short: {len} points, need at least {min}")]
    TraceTooShort { len: usize, min: usize },

    #[error("unknown figure id '{0}'")]
    UnknownFigure(String),

    #[error("unknown verification suite '{0}'")]
    UnknownSuite(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by exceeding a size or memory cap.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Size { .. } | Error::Resource(_))
    }
}
