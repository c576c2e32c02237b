//! The network text format, plus the small query and ordering syntaxes the
//! command line accepts. See `docs/network-format.md` for the grammar.

mod lexer;
mod parse;
mod serialize;

use std::fmt;

pub use parse::{parse_evidence, parse_network, parse_network_unvalidated, parse_ordering};
pub use serialize::serialize_network;

/// Format version written by [`serialize_network`] and required by the parser.
pub const FORMAT_VERSION: u32 = 1;

/// 1-based line and column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// The text does not follow the grammar.
    Syntax,
    /// Well-formed text describing an invalid network.
    Semantic,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{position}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: Position,
    pub message: String,
}

impl ParseError {
    fn syntax(position: Position, message: impl Into<String>) -> Self {
        ParseError { kind: ParseErrorKind::Syntax, position, message: message.into() }
    }

    fn semantic(position: Position, message: impl Into<String>) -> Self {
        ParseError { kind: ParseErrorKind::Semantic, position, message: message.into() }
    }
}
