use std::path::PathBuf;

/// Crate-wide error type.
///
/// The variants map one-to-one onto the failure classes the tools report:
/// bad arguments, malformed input files, exhausted resource caps, instances
/// that can never be solved, and solutions that do not have the shape the
/// decoder requires.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("solution structure violated: {0}")]
    Structure(String),

    #[error("campaign mismatch at trial {trial}: {detail}")]
    CampaignMismatch {
        trial: u64,
        detail: String,
        replay: Option<PathBuf>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
