use alloc::sync::Arc;
use core::fmt;

/// Source location of an entity: 1-based line and column of its first
/// character, plus its length in characters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub file: Arc<str>,
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl Span {
    pub fn new(file: Arc<str>, line: usize, column: usize, length: usize) -> Self {
        debug_assert!(line >= 1 && column >= 1);
        Span {
            file,
            line,
            column,
            length,
        }
    }

    /// Smallest span starting at `self` and ending where `end` ends.
    /// Both spans must sit on the same line.
    pub fn to(&self, end: &Span) -> Span {
        let stop = end.column + end.length;
        Span {
            file: self.file.clone(),
            line: self.line,
            column: self.column,
            length: stop.saturating_sub(self.column),
        }
    }

    /// `(line:column)`, the form used in every report.
    pub fn position(&self) -> Position {
        Position(self.line, self.column)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position(pub usize, pub usize);

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{})", self.0, self.1)
    }
}
