//! AsmetaL front end: lexing, parsing and pretty-printing.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;

pub use ast::*;
pub use lexer::{tokenize, Kw, Tok, Token};
pub use parser::{normalize_text, parse_model};
pub use printer::print_model;

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrontendErrorKind {
    Lex,
    Parse,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct FrontendError {
    pub kind: FrontendErrorKind,
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl FrontendError {
    pub fn lex(line: u32, col: u32, message: impl Into<String>) -> Self {
        FrontendError { kind: FrontendErrorKind::Lex, line, col, message: message.into() }
    }

    pub fn parse(line: u32, col: u32, message: impl Into<String>) -> Self {
        FrontendError { kind: FrontendErrorKind::Parse, line, col, message: message.into() }
    }
}

impl fmt::Display for FrontendError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

/// Tokenizes and parses a complete model.
pub fn parse_source(source: &str) -> Result<ModelAst, FrontendError> {
    let tokens = tokenize(source)?;
    parse_model(&tokens, source)
}
