use alloc::string::String;

use thiserror::Error;

use crate::span::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("division by zero")]
pub struct DivisionByZero;

/// Lexing, parsing and name-resolution failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("{span}: {message}")]
    Lex { span: Span, message: String },
    #[error("{span}: expected {expected}, found {found}")]
    Parse {
        span: Span,
        expected: String,
        found: String,
    },
    #[error("{span}: unresolved name `{name}`")]
    UnresolvedName { span: Span, name: String },
    #[error("{span}: `{name}` is declared more than once in this scope")]
    DuplicateName { span: Span, name: String },
    #[error("{span}: function `{function}` never assigns its result")]
    MissingResult { span: Span, function: String },
}

impl SyntaxError {
    pub fn span(&self) -> &Span {
        match self {
            SyntaxError::Lex { span, .. }
            | SyntaxError::Parse { span, .. }
            | SyntaxError::UnresolvedName { span, .. }
            | SyntaxError::DuplicateName { span, .. }
            | SyntaxError::MissingResult { span, .. } => span,
        }
    }
}

/// Failures while turning a program into unit constraints.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("{span}: call to undefined function `{name}`")]
    UnknownFunction { span: Span, name: String },
    #[error("{span}: `{function}` takes {expected} argument(s) but {found} were given")]
    ArityMismatch {
        span: Span,
        function: String,
        expected: usize,
        found: usize,
    },
    #[error("{span}: unit variables are only allowed in function scopes")]
    PolymorphicAnnotationAtMainScope { span: Span },
    #[error("{span}: exponent must be an integer literal")]
    PowExponent { span: Span },
    #[error("{span}: recursive call to `{function}` is not supported")]
    RecursionUnsupported { span: Span, function: String },
}

impl GenError {
    pub fn span(&self) -> &Span {
        match self {
            GenError::UnknownFunction { span, .. }
            | GenError::ArityMismatch { span, .. }
            | GenError::PolymorphicAnnotationAtMainScope { span }
            | GenError::PowExponent { span }
            | GenError::RecursionUnsupported { span, .. } => span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("critical variables are undefined for an inconsistent system")]
    CalledOnInconsistent,
    #[error("refusing to synthesize annotations for an inconsistent program")]
    RefusesOnInconsistent,
}
