use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    /// An enumeration would exceed the configured work cap.
    #[error("capacity exceeded: {what} needs {required}, cap is {cap}")]
    Capacity {
        what: &'static str,
        required: usize,
        cap: usize,
    },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid bit string {0:?}")]
    BitString(String),

    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },

    #[error("model error: {0}")]
    Model(String),

    #[error("invalid zonotope: {0}")]
    Invalid(String),

    #[error("mode mismatch: {0}")]
    Mode(String),

    #[error("key search failed: {0}")]
    SearchFailure(String),

    #[error("at step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dim(expected: usize, found: usize) -> Self {
        Error::Dimension { expected, found }
    }

    pub(crate) fn at_step(self, step: usize) -> Self {
        match self {
            e @ Error::AtStep { .. } => e,
            other => Error::AtStep {
                step,
                source: Box::new(other),
            },
        }
    }

    /// Strips any step context.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_capacity(&self) -> bool {
        matches!(self.root(), Error::Capacity { .. })
    }
}

/// Fails with [`Error::Capacity`] when enumerating `bits` binary choices is over `cap`.
pub(crate) fn check_enumeration(what: &'static str, bits: usize, cap: usize) -> Result<()> {
    if bits > cap || bits >= 63 {
        return Err(Error::Capacity {
            what,
            required: bits,
            cap,
        });
    }
    Ok(())
}
