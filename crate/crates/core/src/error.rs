use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A linear solve met a zero pivot or a condition estimate above the guard.
    #[error("singular matrix in {context} (condition estimate {condition:.3e})")]
    SingularMatrix { context: String, condition: f64 },

    #[error("non-finite state reached at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("matrix is not Hurwitz: decay norm {decay:.3e} at the truncation horizon")]
    NotHurwitz { decay: f64 },

    #[error("time {t} outside sample coverage [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("shape error in `{field}`: expected {expected}, found {found}")]
    Shape {
        field: String,
        expected: String,
        found: String,
    },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

impl Error {
    pub(crate) fn singular(context: impl Into<String>, condition: f64) -> Self {
        Error::SingularMatrix {
            context: context.into(),
            condition,
        }
    }

    /// Prefix the context of a singular-matrix error, leave others untouched.
    pub fn in_context(self, outer: &str) -> Self {
        match self {
            Error::SingularMatrix { context, condition } => Error::SingularMatrix {
                context: format!("{outer}: {context}"),
                condition,
            },
            other => other,
        }
    }

    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularMatrix { .. } | Error::NonFiniteState { .. } | Error::NotHurwitz { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
