use std::path::PathBuf;

use crate::account::AccountId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("tweet window is empty")]
    EmptyWindow,

    #[error("tweet {tweet_id} was created after the evaluation instant {as_of}")]
    ClockSkew { tweet_id: String, as_of: String },

    #[error("tweet window belongs to {window} but the snapshot is {snapshot}")]
    AccountMismatch { snapshot: AccountId, window: AccountId },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("line {line}: account {id} appears more than once")]
    DuplicateAccount { line: usize, id: AccountId },

    #[error("line {line}: tweet {tweet_id} references account {author_id} which has not been declared")]
    DanglingReference {
        line: usize,
        tweet_id: String,
        author_id: AccountId,
    },

    #[error("unknown account {0}")]
    UnknownAccount(String),

    #[error("tweet transmission is undefined for the sink node")]
    SinkOperand,

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid tweet window: {0}")]
    InvalidWindow(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures caused by the input data rather than by a bug.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::InvalidNetwork(_) | Error::SinkOperand)
    }
}
