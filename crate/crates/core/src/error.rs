use std::path::PathBuf;

use thiserror::Error;

use crate::cycles::CycleDiagnosis;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong between graph construction and gait
/// characterization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("digraph with {n} vertices exceeds the cap of {cap}")]
    Size { n: usize, cap: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate marker configuration: {0}")]
    Degenerate(String),

    #[error("frame {frame}: only {visible} marker(s) visible, pose cannot be recovered")]
    UnrecoverableFrame { frame: usize, visible: usize },

    #[error("trace ends at {trace_end_s:.3} s but the schedule needs {needed_s:.3} s; missing edges {}", edge_labels(.missing))]
    Truncation {
        trace_end_s: f64,
        needed_s: f64,
        missing: Vec<usize>,
    },

    #[error("no observations for edge(s) {}", edge_labels(.0))]
    MissingEdges(Vec<usize>),

    #[error("not a simple cycle: {0}")]
    Constraint(CycleDiagnosis),

    #[error(
        "refusing to enumerate cycles of a {n}-vertex digraph (cap {cap}): \
         the closed form predicts n_z = {estimate} cycles and enumeration costs O((n + m)(n_z + 1))"
    )]
    EnumerationRefused { n: usize, cap: usize, estimate: String },

    #[error("branch-and-bound budget of {budget} nodes exhausted (incumbent {incumbent:?}, bound {bound})")]
    Resource {
        budget: usize,
        incumbent: Option<f64>,
        bound: f64,
    },

    #[error("covariance of edge e{} is not positive semidefinite (min eigenvalue {min_eigenvalue:e})", .edge + 1)]
    Model { edge: usize, min_eigenvalue: f64 },

    #[error("improvement is undefined for a baseline speed of {0}")]
    UndefinedBaseline(f64),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },
}

/// Formats 0-based edge indices as `e1, e2, ...`.
pub(crate) fn edge_labels(edges: &[usize]) -> String {
    edges.iter().map(|e| format!("e{}", e + 1)).collect::<Vec<_>>().join(", ")
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Usage-level errors (bad files, bad schemas) as opposed to failures of
    /// the numerical pipeline itself.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Schema { .. })
    }
}
