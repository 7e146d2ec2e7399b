//! Text input: polynomial expressions and system definition files.
//!
//! The expression grammar accepts integers, the imaginary unit `i`, the
//! variables `x` and `y`, the operators `+ - * / ^` and parentheses.
//! `^` binds tightest and takes a literal nonnegative integer exponent;
//! unary minus sits between `^` and the multiplicative level; `/` divides
//! by constants only, which is how rational coefficients are written
//! (`x^2/2`, `1/3*y`).  Implicit multiplication is rejected on purpose:
//! `2x` is a syntax error, `2*x` is not.  All offsets in errors are byte
//! positions into the parsed text.
//!
//! System files are line oriented:
//!
//! ```text
//! # anything after a hash is a comment
//! dx = y + x^2
//! dy = -x + x*y
//! option.order = 24
//! ```

use std::collections::BTreeMap;

use num::{BigInt, BigRational};
use thiserror::Error;

use crate::gaussian::GaussianRational;
use crate::poly::BivarPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("divisor at byte {offset} is not a constant")]
    NonConstantDivisor { offset: usize },
    #[error("division by zero at byte {offset}")]
    DivisionByZero { offset: usize },
    #[error("exponent at byte {offset} must be a literal nonnegative integer")]
    BadExponent { offset: usize },
}

impl ParseError {
    /// Shifts every stored offset by `base` (used to map errors from an
    /// embedded expression back to positions in the surrounding file).
    pub fn shift(self, base: usize) -> Self {
        match self {
            ParseError::Syntax { offset, message } => {
                ParseError::Syntax { offset: offset + base, message }
            }
            ParseError::NonConstantDivisor { offset } => {
                ParseError::NonConstantDivisor { offset: offset + base }
            }
            ParseError::DivisionByZero { offset } => {
                ParseError::DivisionByZero { offset: offset + base }
            }
            ParseError::BadExponent { offset } => ParseError::BadExponent { offset: offset + base },
        }
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { offset, message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    Number(BigInt),
    X,
    Y,
    ImaginaryUnit,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let b = bytes[pos];
        let kind = match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                pos += 1;
                continue;
            }
            b'+' => TokenKind::Plus,
            b'-' => TokenKind::Minus,
            b'*' => TokenKind::Star,
            b'/' => TokenKind::Slash,
            b'^' => TokenKind::Caret,
            b'(' => TokenKind::LParen,
            b')' => TokenKind::RParen,
            b'0'..=b'9' => {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                let digits = &text[start..pos];
                let value: BigInt = digits.parse().expect("digit run parses");
                tokens.push(Token { kind: TokenKind::Number(value), offset: start });
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = pos;
                while pos < bytes.len()
                    && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_')
                {
                    pos += 1;
                }
                let name = &text[start..pos];
                let kind = match name {
                    "x" => TokenKind::X,
                    "y" => TokenKind::Y,
                    "i" => TokenKind::ImaginaryUnit,
                    _ => return Err(syntax(start, format!("unknown symbol `{name}`"))),
                };
                tokens.push(Token { kind, offset: start });
                continue;
            }
            _ => {
                return Err(syntax(pos, format!("unexpected character `{}`", text[pos..].chars().next().unwrap())));
            }
        };
        tokens.push(Token { kind, offset: pos });
        pos += 1;
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn expr(&mut self) -> Result<BivarPoly, ParseError> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            match t.kind {
                TokenKind::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                TokenKind::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<BivarPoly, ParseError> {
        let mut acc = self.unary()?;
        while let Some(t) = self.peek() {
            match t.kind {
                TokenKind::Star => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                TokenKind::Slash => {
                    let at = t.offset;
                    self.bump();
                    let rhs = self.unary()?;
                    let Some(c) = constant_of(&rhs) else {
                        return Err(ParseError::NonConstantDivisor { offset: at });
                    };
                    if c.is_zero() {
                        return Err(ParseError::DivisionByZero { offset: at });
                    }
                    acc = acc.scale(&c.inv());
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<BivarPoly, ParseError> {
        if let Some(t) = self.peek() {
            if t.kind == TokenKind::Minus {
                self.bump();
                return Ok(-&self.unary()?);
            }
        }
        self.power()
    }

    fn power(&mut self) -> Result<BivarPoly, ParseError> {
        let mut base = self.atom()?;
        while matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Caret)) {
            self.bump();
            let at = self.offset();
            match self.bump().map(|t| t.kind) {
                Some(TokenKind::Number(n)) => {
                    let e: u32 = n
                        .try_into()
                        .map_err(|_| syntax(at, "exponent out of range"))?;
                    base = base.pow(e);
                }
                _ => return Err(ParseError::BadExponent { offset: at }),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<BivarPoly, ParseError> {
        let at = self.offset();
        match self.bump().map(|t| t.kind) {
            Some(TokenKind::Number(n)) => {
                Ok(BivarPoly::constant(GaussianRational::from_real(BigRational::from_integer(n))))
            }
            Some(TokenKind::X) => Ok(BivarPoly::x()),
            Some(TokenKind::Y) => Ok(BivarPoly::y()),
            Some(TokenKind::ImaginaryUnit) => Ok(BivarPoly::constant(GaussianRational::i())),
            Some(TokenKind::LParen) => {
                let inner = self.expr()?;
                match self.bump().map(|t| t.kind) {
                    Some(TokenKind::RParen) => Ok(inner),
                    _ => Err(syntax(at, "unclosed parenthesis")),
                }
            }
            Some(_) => Err(syntax(at, "expected a value")),
            None => Err(syntax(at, "unexpected end of expression")),
        }
    }
}

fn constant_of(p: &BivarPoly) -> Option<GaussianRational> {
    if p.is_constant() {
        Some(p.coeff(0, 0))
    } else {
        None
    }
}

/// Parses a single polynomial expression.
pub fn parse_polynomial(text: &str) -> Result<BivarPoly, ParseError> {
    let tokens = lex(text)?;
    if tokens.is_empty() {
        return Err(syntax(0, "empty expression"));
    }
    let mut parser = Parser { tokens, pos: 0, end: text.len() };
    let poly = parser.expr()?;
    if let Some(t) = parser.peek() {
        return Err(syntax(t.offset, "unexpected trailing input"));
    }
    Ok(poly)
}

/// A system definition as read from a file, before expression parsing.
///
/// Offsets locate each expression inside the original file so that
/// downstream parse errors can point at the right bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemSpec {
    pub p_text: String,
    pub q_text: String,
    pub p_offset: usize,
    pub q_offset: usize,
    pub options: BTreeMap<String, String>,
}

/// Reads the line-oriented system file format.
pub fn parse_system_file(text: &str) -> Result<SystemSpec, ParseError> {
    let mut p: Option<(String, usize)> = None;
    let mut q: Option<(String, usize)> = None;
    let mut options = BTreeMap::new();
    let mut line_start = 0;
    for raw_line in text.split_inclusive('\n') {
        let this_start = line_start;
        line_start += raw_line.len();
        let line = raw_line.strip_suffix('\n').unwrap_or(raw_line);
        let content = match line.find('#') {
            Some(h) => &line[..h],
            None => line,
        };
        if content.trim().is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            return Err(syntax(this_start, "expected `name = value`"));
        };
        let name = content[..eq].trim();
        let value_raw = &content[eq + 1..];
        let indent = value_raw.len() - value_raw.trim_start().len();
        let value_offset = this_start + eq + 1 + indent;
        let value = value_raw.trim();
        match name {
            "dx" => {
                if p.is_some() {
                    return Err(syntax(this_start, "duplicate dx line"));
                }
                p = Some((value.to_string(), value_offset));
            }
            "dy" => {
                if q.is_some() {
                    return Err(syntax(this_start, "duplicate dy line"));
                }
                q = Some((value.to_string(), value_offset));
            }
            _ => match name.strip_prefix("option.") {
                Some(key) if !key.trim().is_empty() => {
                    options.insert(key.trim().to_string(), value.to_string());
                }
                _ => return Err(syntax(this_start, format!("unrecognized directive `{name}`"))),
            },
        }
    }
    let (p_text, p_offset) = p.ok_or_else(|| syntax(text.len(), "missing dx line"))?;
    let (q_text, q_offset) = q.ok_or_else(|| syntax(text.len(), "missing dy line"))?;
    Ok(SystemSpec { p_text, q_text, p_offset, q_offset, options })
}
