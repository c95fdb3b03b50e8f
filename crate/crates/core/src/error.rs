use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad class of a failure, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input text or bad arguments.
    Input,
    /// A connectivity assumption required by the surfer does not hold.
    Assumption,
    /// Two independent computations disagreed, or a numerical guard tripped.
    Consistency,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },

    #[error("line {line}: self-loop on node `{label}`")]
    SelfLoop { line: usize, label: String },

    #[error("line {line}: time value {time} decreases (previous was {previous})")]
    DecreasingTime { line: usize, time: u64, previous: u64 },

    #[error("no snapshots")]
    NoSnapshots,

    #[error("node `{label}` has no out-links and no in-links; backlink repair impossible")]
    Unrepairable { label: String },

    #[error("node `{label}` has zero out-degree; repair dangling nodes first")]
    ZeroOutDegree { label: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parameter {name} = {value} outside {range}")]
    Parameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("not an oriented tree: {0}")]
    NotOrientedTree(String),

    #[error("cannot normalize an all-zero vector")]
    ZeroTotal,

    #[error("cannot normalize: entry {index} is negative ({value})")]
    NegativeEntry { index: usize, value: f64 },

    #[error("regression row {0} has no target; supply the network size or use the unknown-size engine")]
    MissingTarget(usize),

    #[error("Gram matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("dense solve limited to {limit} nodes, got {n}")]
    ScaleLimit { n: usize, limit: usize },

    #[error("power iteration did not converge in {max_iter} iterations (last change {last_change:e})")]
    NoConvergence { max_iter: usize, last_change: f64 },

    #[error("Assumption 1 (strong connectivity) violated: {0}")]
    Assumption1(String),

    #[error("Assumption 2 (joint strong connectivity) violated: {0}")]
    Assumption2(String),

    #[error("snapshot index {index} out of range ({len} snapshots)")]
    SnapshotOutOfRange { index: usize, len: usize },

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Assumption1(_) | Error::Assumption2(_) => ErrorClass::Assumption,
            Error::NotPositiveDefinite
            | Error::NoConvergence { .. }
            | Error::Protocol(_)
            | Error::Consistency(_) => ErrorClass::Consistency,
            _ => ErrorClass::Input,
        }
    }
}
