use thiserror::Error;

/// Malformed text input. `line` is 1-based; 0 means "whole input".
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid degrees {0:?}: expected 0 <= d1 <= d2 <= d3 <= d4")]
    InvalidDegrees([u32; 4]),
    #[error("no base case for HHH(FT4^{n}) in {mode} mode")]
    MissingBaseCase { n: u32, mode: crate::engine::EvalMode },
    #[error(transparent)]
    Cache(#[from] CacheError),
}

#[derive(Debug, Error)]
pub enum BaseCaseError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("checksum mismatch for entry n = {n}: file says {stated}, content hashes to {actual}")]
    ChecksumMismatch { n: u32, stated: String, actual: String },
    #[error("entry n = {n} has a negative expansion coefficient {coefficient}")]
    PositivityViolation { n: u32, coefficient: String },
    #[error("a0 entry n = {n} contains a-terms")]
    UnexpectedATerms { n: u32 },
    #[error("conflicting entries for n = {n} ({mode})")]
    Conflict { n: u32, mode: crate::engine::EvalMode },
    #[error("reconstruction did not stabilize: numerator changed between orders {lower} and {upper}")]
    NotStabilized { lower: u32, upper: u32 },
    #[error("reconstructed series has negative coefficient {coefficient}")]
    NegativeCoefficient { coefficient: String },
    #[error("oracle table covers total degree {have}, need {need}")]
    InsufficientTable { have: u32, need: u32 },
    #[error("cannot normalize reconstruction: q^0 part is {0}, not a single monomial")]
    Normalization(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Cache(#[from] CacheError),
}

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("conflicting cache entry for key `{key}`")]
    ConflictingEntry { key: String },
    #[error("corrupt cache entry for key `{key}`: {reason}")]
    CorruptEntry { key: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("no single monomial shift aligns engine and oracle tables: {0}")]
    AmbiguousShift(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error("bad cached oracle value: {0}")]
    BadCachedValue(String),
}
