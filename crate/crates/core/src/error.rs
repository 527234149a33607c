use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown nonterminal `{0}`")]
    UnknownNonterminal(String),
    #[error("duplicate root declaration `{0}`")]
    DuplicateRoot(String),
}

/// 1-based line and column in a source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError {
            span,
            message: message.into(),
        }
    }
}

/// A transformation step whose preconditions do not hold.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{operator}: {reason} (at `{symbol}`)")]
pub struct TransformError {
    pub operator: &'static str,
    pub symbol: String,
    pub reason: String,
}

impl TransformError {
    pub(crate) fn new(operator: &'static str, symbol: &str, reason: impl Into<String>) -> Self {
        TransformError {
            operator,
            symbol: symbol.to_string(),
            reason: reason.into(),
        }
    }
}

/// A trace replay failure; `index` is the 1-based position of the step.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {index}: {error}")]
pub struct TraceError {
    pub index: usize,
    pub error: TransformError,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("grammar has no root")]
    NoRoot,
    #[error("root `{0}` is undefined")]
    RootUndefined(String),
    #[error("root `{root}` does not reach secondary root `{other}`")]
    UnreachableRoot { root: String, other: String },
    #[error("root `{0}` has no alternative left after abstraction")]
    EmptyRoot(String),
    #[error("no fixpoint within a budget of {0} steps")]
    BudgetExhausted(usize),
    #[error("result still violates ANF: {0}")]
    Incomplete(String),
    #[error("internal step failed: {0}")]
    Step(#[from] TransformError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error(
    "structural mismatch at `{nonterminal}`: {reason}\n  master: {master}\n  servant: {servant}"
)]
pub struct StructError {
    pub nonterminal: String,
    pub reason: String,
    pub master: String,
    pub servant: String,
}
