use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precedence relation contains a cycle through job `{0}`")]
    Cycle(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("unknown job id `{0}`")]
    UnknownJob(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),
    #[error("row generation stopped after {cuts} cuts (cap {cap}); last violated cut has x-sum {last_violation}")]
    IterationCap {
        cap: usize,
        cuts: usize,
        last_violation: String,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
