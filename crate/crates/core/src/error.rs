use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("network contains a directed cycle through {0:?}")]
    Cyclic(Vec<String>),

    #[error("invalid parameterization: {0}")]
    InvalidParameters(String),

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("invalid evidence: {0}")]
    InvalidEvidence(String),

    #[error("example {example} has probability zero under the current parameters")]
    ImpossibleEvidence { example: usize },

    #[error("state space of {states} joint states exceeds the brute-force limit of {limit}")]
    StateSpaceTooLarge { states: u128, limit: u128 },

    #[error(
        "parameter set {variable}|{parent_config} has a non-positive update denominator; \
         use Dirichlet exponents > 1"
    )]
    DegenerateUpdate { variable: String, parent_config: usize },

    #[error("soft evidence for {variable}|{parent_config} is inconsistent: {detail}")]
    SoftEvidence {
        variable: String,
        parent_config: usize,
        detail: String,
    },

    #[error("island update is undefined: an observation has zero weight under the current estimate")]
    ZeroIslandMixture,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
