use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quadrature grid of degree {degree} needs {nodes} nodes, budget is {budget}")]
    BudgetExceeded {
        degree: usize,
        nodes: usize,
        budget: usize,
    },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("symmetric eigensolver did not converge on a block of size {size} (matrix size {matrix_size}, max |entry| {max_entry:.3e})")]
    EigenNonConvergence {
        size: usize,
        matrix_size: usize,
        max_entry: f64,
    },

    #[error("cluster windows overlap at k = {k} (window half-width {half_width:.3}); reduce the potential sup-norm or raise the lowest retained cluster")]
    ClusterOverlap { k: usize, half_width: f64 },

    #[error("cluster k = {k} holds {found} eigenvalues in its window, expected {expected}")]
    ClusterCount {
        k: usize,
        found: usize,
        expected: usize,
    },

    #[error("cluster k = {k} is not retained by this decomposition")]
    ClusterNotRetained { k: usize },

    #[error("second-order average needs a potential with constant Radon transform; the non-constant part has norm {norm:.3e}")]
    NonConstantAverage { norm: f64 },

    #[error("second-order average is under-resolved: base points disagree by {spread:.3e} (raise the node count)")]
    UnderResolved { spread: f64 },

    #[error("flow step rejected after {halvings} halvings at t = {time:.6} (energy drift {drift:.3e})")]
    FlowStepRejected {
        time: f64,
        drift: f64,
        halvings: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid harmonic index (l = {l}, m = {m})")]
    InvalidIndex { l: i64, m: i64 },

    #[error("duplicate harmonic coefficient (l = {l}, m = {m})")]
    DuplicateIndex { l: usize, m: i64 },

    #[error("region parse error at column {column}: {message}")]
    RegionParse { column: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("scenario failure in {stage}: {detail}")]
    Scenario { stage: String, detail: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
