//! Line-oriented tokenizer.
//!
//! Statements end at newlines, so `Newline` is a real token. A `!=` that is
//! the first non-blank text on its line opens an annotation; the rest of that
//! line is lexed in annotation mode (where `unit` is a keyword and `'a` is a
//! unit variable). Any other `!` starts a comment that is kept as trivia on
//! the next token.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::SyntaxError;
use crate::span::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    KwReal,
    KwFunction,
    KwEnd,
    KwContains,
    KwUnit,
    Ident(String),
    Number(String),
    /// `'a` inside an annotation, stored without the quote.
    UnitVar(String),
    AnnotStart,
    DColon,
    Comma,
    LParen,
    RParen,
    Eq,
    Plus,
    Minus,
    Star,
    Slash,
    Power,
    Newline,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::KwReal => f.write_str("`real`"),
            TokenKind::KwFunction => f.write_str("`function`"),
            TokenKind::KwEnd => f.write_str("`end`"),
            TokenKind::KwContains => f.write_str("`contains`"),
            TokenKind::KwUnit => f.write_str("`unit`"),
            TokenKind::Ident(name) => write!(f, "identifier `{name}`"),
            TokenKind::Number(text) => write!(f, "number `{text}`"),
            TokenKind::UnitVar(name) => write!(f, "unit variable `'{name}`"),
            TokenKind::AnnotStart => f.write_str("`!=`"),
            TokenKind::DColon => f.write_str("`::`"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::Eq => f.write_str("`=`"),
            TokenKind::Plus => f.write_str("`+`"),
            TokenKind::Minus => f.write_str("`-`"),
            TokenKind::Star => f.write_str("`*`"),
            TokenKind::Slash => f.write_str("`/`"),
            TokenKind::Power => f.write_str("`**`"),
            TokenKind::Newline => f.write_str("end of line"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
    /// Ordinary `!` comments seen since the previous token, verbatim.
    pub trivia: Vec<String>,
}

/// Tokenize with a placeholder file name.
pub fn tokenize(source: &str) -> Result<Vec<Token>, SyntaxError> {
    tokenize_file(source, "<input>")
}

pub fn tokenize_file(source: &str, file: &str) -> Result<Vec<Token>, SyntaxError> {
    Lexer::new(source, Arc::from(file)).run()
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    file: Arc<str>,
    in_annotation: bool,
    line_has_code: bool,
    pending_trivia: Vec<String>,
    out: Vec<Token>,
}

impl Lexer {
    fn new(src: &str, file: Arc<str>) -> Self {
        Lexer {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
            file,
            in_annotation: false,
            line_has_code: false,
            pending_trivia: Vec::new(),
            out: Vec::new(),
        }
    }

    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek(0)?;
        self.pos += 1;
        self.col += 1;
        Some(c)
    }

    fn span(&self, line: usize, col: usize, len: usize) -> Span {
        Span::new(self.file.clone(), line, col, len)
    }

    fn push(&mut self, kind: TokenKind, line: usize, col: usize, len: usize) {
        let trivia = core::mem::take(&mut self.pending_trivia);
        self.out.push(Token {
            kind,
            span: self.span(line, col, len),
            trivia,
        });
        self.line_has_code = true;
    }

    fn run(mut self) -> Result<Vec<Token>, SyntaxError> {
        while let Some(c) = self.peek(0) {
            let (line, col) = (self.line, self.col);
            match c {
                '\n' => {
                    self.bump();
                    if self.line_has_code {
                        let trivia = core::mem::take(&mut self.pending_trivia);
                        self.out.push(Token {
                            kind: TokenKind::Newline,
                            span: self.span(line, col, 0),
                            trivia,
                        });
                    }
                    self.line += 1;
                    self.col = 1;
                    self.in_annotation = false;
                    self.line_has_code = false;
                }
                ' ' | '\t' | '\r' => {
                    self.bump();
                }
                '!' => {
                    if !self.line_has_code && self.peek(1) == Some('=') {
                        self.bump();
                        self.bump();
                        self.push(TokenKind::AnnotStart, line, col, 2);
                        self.in_annotation = true;
                    } else {
                        let mut text = String::new();
                        while let Some(c) = self.peek(0) {
                            if c == '\n' {
                                break;
                            }
                            text.push(c);
                            self.bump();
                        }
                        let text = text.trim_end_matches('\r').to_string();
                        self.pending_trivia.push(text);
                    }
                }
                ':' if self.peek(1) == Some(':') => {
                    self.bump();
                    self.bump();
                    self.push(TokenKind::DColon, line, col, 2);
                }
                '*' if self.peek(1) == Some('*') => {
                    self.bump();
                    self.bump();
                    self.push(TokenKind::Power, line, col, 2);
                }
                ',' | '(' | ')' | '=' | '+' | '-' | '*' | '/' => {
                    self.bump();
                    let kind = match c {
                        ',' => TokenKind::Comma,
                        '(' => TokenKind::LParen,
                        ')' => TokenKind::RParen,
                        '=' => TokenKind::Eq,
                        '+' => TokenKind::Plus,
                        '-' => TokenKind::Minus,
                        '*' => TokenKind::Star,
                        _ => TokenKind::Slash,
                    };
                    self.push(kind, line, col, 1);
                }
                '\'' if self.in_annotation => {
                    self.bump();
                    let name = self.take_word();
                    if !name.starts_with(|c: char| c.is_ascii_lowercase()) {
                        return Err(SyntaxError::Lex {
                            span: self.span(line, col, 1 + name.chars().count()),
                            message: "unit variable must be `'` followed by a lowercase name"
                                .into(),
                        });
                    }
                    let len = 1 + name.chars().count();
                    self.push(TokenKind::UnitVar(name), line, col, len);
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let word = self.take_word();
                    let len = word.chars().count();
                    let kind = if self.in_annotation {
                        match word.as_str() {
                            "unit" => TokenKind::KwUnit,
                            _ => TokenKind::Ident(word),
                        }
                    } else {
                        match word.as_str() {
                            "real" => TokenKind::KwReal,
                            "function" => TokenKind::KwFunction,
                            "end" => TokenKind::KwEnd,
                            "contains" => TokenKind::KwContains,
                            _ => TokenKind::Ident(word),
                        }
                    };
                    self.push(kind, line, col, len);
                }
                c if c.is_ascii_digit()
                    || (c == '.' && self.peek(1).is_some_and(|d| d.is_ascii_digit())) =>
                {
                    let text = self.take_number();
                    let len = text.chars().count();
                    self.push(TokenKind::Number(text), line, col, len);
                }
                other => {
                    return Err(SyntaxError::Lex {
                        span: self.span(line, col, 1),
                        message: alloc::format!("illegal character `{other}`"),
                    });
                }
            }
        }
        Ok(self.out)
    }

    fn take_word(&mut self) -> String {
        let mut word = String::new();
        while let Some(c) = self.peek(0) {
            if c.is_ascii_alphanumeric() || c == '_' {
                word.push(c);
                self.bump();
            } else {
                break;
            }
        }
        word
    }

    fn take_number(&mut self) -> String {
        let mut text = String::new();
        let digits = |lx: &mut Self, text: &mut String| {
            while let Some(c) = lx.peek(0).filter(|c| c.is_ascii_digit()) {
                text.push(c);
                lx.bump();
            }
        };
        digits(self, &mut text);
        if self.peek(0) == Some('.') && !self.in_annotation {
            text.push('.');
            self.bump();
            digits(self, &mut text);
        }
        if !self.in_annotation && matches!(self.peek(0), Some('e' | 'E' | 'd' | 'D')) {
            let sign = matches!(self.peek(1), Some('+' | '-'));
            let digit_at = if sign { 2 } else { 1 };
            if self.peek(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                for _ in 0..digit_at {
                    let c = self.bump().unwrap();
                    text.push(c);
                }
                digits(self, &mut text);
            }
        }
        text
    }
}
