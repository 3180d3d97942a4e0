use thiserror::Error;

/// Errors raised by the geometry, sampling and experiment layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("need at least {needed} points distinct from the query, found {available}")]
    InsufficientPoints { needed: usize, available: usize },

    #[error("origin is not an interior point of the cell (centered inradius {0})")]
    OriginNotInterior(f64),

    #[error("degenerate simplex")]
    DegenerateSimplex,

    #[error("density value {value} exceeds the declared envelope {bound} at {at:?}")]
    EnvelopeViolation { value: f64, bound: f64, at: Vec<f64> },

    #[error("voronoi cell of {nucleus:?} is not certified inside the sampled region; enlarge the buffer")]
    UnboundedCell { nucleus: Vec<f64> },

    #[error("calibration sample of size {have} is too small, need at least {needed}")]
    InsufficientSample { needed: usize, have: usize },

    #[error("need at least {needed} pooled centers, have {have}")]
    InsufficientCenters { needed: usize, have: usize },

    #[error("test function `{function}` is not supported by {identity}")]
    UnsupportedTestFunction { function: String, identity: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("resource limit: {0}")]
    Resources(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
