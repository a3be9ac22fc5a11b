use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input data does not have the declared shape or contains non-finite values.
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("shape mismatch: expected length {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    /// A signal was required to belong to a signal space but does not.
    #[error("signal is not a member of the signal space (nearest member at distance {distance})")]
    NotMember { distance: f64 },

    /// Two routes to the same quantity disagree beyond tolerance.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    /// A net is too coarse to represent an operation within the snapping tolerance.
    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("invalid operation: {0}")]
    InvalidOperation(String),

    #[error("malformed operator: {0}")]
    MalformedOperator(String),

    /// A construction whose precondition fails; `uncovered` lists witness indices.
    #[error("refused: {reason}")]
    Refused { reason: String, uncovered: Vec<usize> },

    #[error("completion is not saturated after exploring {explored} points")]
    Unsaturated { explored: usize },

    /// A failure inside a named stage of the compactification pipeline.
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }

    /// True for errors caused by bad user input rather than failed checks.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Stage { source, .. } => source.is_input_error(),
            Error::Malformed(_)
            | Error::Parameter(_)
            | Error::Shape { .. }
            | Error::MalformedOperator(_)
            | Error::Io(_)
            | Error::Json(_) => true,
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
