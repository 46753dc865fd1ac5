use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A kernel produced a Schur complement that is negative beyond the PSD tolerance.
    #[error("numeric domain error at element {element}: {message}")]
    NumericDomain { element: usize, message: String },

    #[error("{}", fmt_load(.path, .line, .message))]
    Load {
        path: String,
        line: Option<usize>,
        message: String,
    },

    #[error(
        "refusing exhaustive search: C({n}, {k}) = {count} exceeds the limit of {limit} subsets"
    )]
    Refused {
        n: usize,
        k: usize,
        count: u128,
        limit: u128,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn fmt_load(path: &str, line: &Option<usize>, message: &str) -> String {
    match line {
        Some(line) => format!("failed to load {path} (line {line}): {message}"),
        None => format!("failed to load {path}: {message}"),
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn load(
        path: impl Into<String>,
        line: Option<usize>,
        msg: impl Into<String>,
    ) -> Self {
        Error::Load {
            path: path.into(),
            line,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
