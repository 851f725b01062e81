use thiserror::Error;

pub type Result<T> = std::result::Result<T, NcfaError>;

#[derive(Debug, Error)]
pub enum NcfaError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("exact solver refused a graph on {n} vertices (cap is {cap}); use the heuristic solver")]
    SolverRefused { n: usize, cap: usize },

    #[error("graph does not satisfy the pure-child structure: {0}")]
    PreconditionViolated(String),

    #[error("training diverged: non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("{stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<NcfaError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl NcfaError {
    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        NcfaError::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The innermost error, looking through stage wrappers.
    pub fn root(&self) -> &NcfaError {
        match self {
            NcfaError::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}
