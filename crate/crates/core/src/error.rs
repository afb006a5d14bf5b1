use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("inconsistent duality window: {0}")]
    WindowConflict(String),

    #[error("ambiguous duality window, candidates {0:?}; pass the window explicitly")]
    AmbiguousWindow(Vec<i32>),

    #[error("unclassified pair {0} ^ {1}")]
    UnclassifiedPair(String, String),

    #[error("verification failed for {input}: {detail}")]
    VerificationFailed { input: String, detail: String },

    #[error("untabulated hom group [{source_desc}, {target}]: {reason}")]
    UntabulatedHom {
        source_desc: String,
        target: String,
        reason: String,
    },

    #[error("unknown composition {0} o {1}")]
    UnknownComposition(String, String),

    #[error("ill-typed morphism: {0}")]
    IllTyped(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("data error: {0}")]
    Data(String),

    #[error("cell ({row},{col}): {source}")]
    AtCell {
        row: usize,
        col: usize,
        source: Box<Error>,
    },

    #[error("step {index}: {source}")]
    AtStep { index: usize, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }
}
