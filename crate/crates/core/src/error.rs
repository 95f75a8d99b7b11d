use thiserror::Error;

/// Errors raised by the workbench.
///
/// Everything except [`Error::Internal`] is a domain error caused by the
/// caller's input. `Internal` signals that a computed result contradicted a
/// structural invariant and should be treated as a bug.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown token {found:?} at offset {offset}")]
    UnknownToken { offset: usize, found: char },

    #[error("context K[{v},{d}] exceeds the universe cap of {cap} minterms")]
    UniverseCap { v: u32, d: u32, cap: u64 },

    #[error("{what} exceeds the cap of {cap}")]
    Cap { what: String, cap: u64 },

    #[error("formula has modal degree {degree} but the context allows at most {max}")]
    DegreeOverflow { degree: u32, max: u32 },

    #[error("formula uses {used} variable(s) but the context has only {available}")]
    VariableOverflow { used: u32, available: u32 },

    #[error("operation needs modal degree {expected}, context has {found}")]
    WrongDegree { expected: &'static str, found: u32 },

    #[error("context mismatch: K[{0},{1}] vs K[{2},{3}]")]
    ContextMismatch(u32, u32, u32, u32),

    #[error("arity mismatch: {0} vs {1} variables")]
    Arity(u32, u32),

    #[error("invalid coordinate: {0}")]
    InvalidCoordinate(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
