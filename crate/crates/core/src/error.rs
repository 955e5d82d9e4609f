use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-domain arguments (non-fundamental discriminant,
    /// indefinite algebra, rank-deficient basis, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A search that is guaranteed to succeed under the documented
    /// preconditions came up empty (no valid suborder step, no connecting
    /// element, no suitable auxiliary field, ...).
    #[error("search failed: {0}")]
    NotFound(String),

    /// Exact linear algebra failure (singular where invertible was required,
    /// vector outside an expected span).
    #[error("linear algebra: {0}")]
    Linalg(String),

    /// The requested configuration violates a working hypothesis of the
    /// central-value identity (parity of the sign pattern, odd weight, ...).
    /// Mapped to exit code 2 by the command line tool.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// Two independent computations of the same quantity disagree, or a
    /// completeness certificate failed. Always a bug or a broken invariant,
    /// never a property of the input. Exit code 3.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    /// Valid mathematics that this implementation deliberately does not
    /// cover.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the command line tool reports for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Hypothesis(_) => 2,
            Error::Consistency(_) => 3,
            _ => 1,
        }
    }
}
