use thiserror::Error;

use crate::atom::Atom;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("vocabulary error: {0}")]
    Vocabulary(String),
    #[error("valuation error: variable `{0}` has no value")]
    Valuation(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("duplicate binder `{0}`")]
    DuplicateBinder(String),
    #[error("kind error: {0}")]
    Kind(String),
    #[error("atom {0} is outside the domain of the map")]
    Domain(Atom),
    #[error("{0} is not in the domain of the function")]
    NotInDomain(String),
    #[error("not a partial automorphism: {0}")]
    NotPartialAutomorphism(String),
    #[error("support error: parameter {0} is not in the given support")]
    Support(Atom),
    #[error("the {0} backend is not dense")]
    NotDense(&'static str),
    #[error("resource budget exceeded: {what} ({count} > {limit})")]
    Budget {
        what: &'static str,
        count: u128,
        limit: u128,
    },
    #[error("containment error: interpretation of `{0}` is not contained in its ambient set")]
    Containment(String),
    #[error("arity error: {0}")]
    Arity(String),
    #[error("signature mismatch: {0}")]
    Signature(String),
    #[error("backend mismatch: {0} vs {1}")]
    BackendMismatch(String, String),
    #[error("function error: {0}")]
    Function(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}
