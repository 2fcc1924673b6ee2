//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr    := term (("+"|"-") term)* ;
//! term    := factor (("*"|"/") factor)* ;
//! factor  := "-" factor | power ;
//! power   := atom ("^" factor)? ;
//! atom    := NUMBER | "t" | "pi" | "e" | FUNC "(" expr ")" | "(" expr ")" ;
//! FUNC    := "sin"|"cos"|"exp"|"ln"|"sqrt"|"abs" ;
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus. Numbers are
//! plain decimal literals (`2`, `0.5`); scientific notation is not part of
//! the grammar because `e` names Euler's constant.

use crate::real::{lit, Real};

use super::{BinaryOp, Expr, UnaryOp};

/// Parse failure with the character offset it occurred at.
///
/// `position` is a 0-based offset into the input and is at most `len`
/// (one past the end marks unexpected end of input).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at offset {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError {
            position,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(input: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                tokens.push((i, Token::Plus));
                i += 1;
            }
            '-' => {
                tokens.push((i, Token::Minus));
                i += 1;
            }
            '*' => {
                if bytes.get(i + 1) == Some(&b'*') {
                    return Err(ParseError::new(i, "operator \"**\" is not in the grammar; use \"^\""));
                }
                tokens.push((i, Token::Star));
                i += 1;
            }
            '/' => {
                tokens.push((i, Token::Slash));
                i += 1;
            }
            '^' => {
                tokens.push((i, Token::Caret));
                i += 1;
            }
            '(' => {
                tokens.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((i, Token::RParen));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let text = &input[start..i];
                let value: f64 = text
                    .parse()
                    .map_err(|_| ParseError::new(start, format!("invalid number literal \"{text}\"")))?;
                tokens.push((start, Token::Number(value)));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push((start, Token::Ident(input[start..i].to_string())));
            }
            _ => return Err(ParseError::new(i, format!("unexpected character '{c}'"))),
        }
    }
    Ok(tokens)
}

struct Parser<'a, T> {
    tokens: &'a [(usize, Token)],
    pos: usize,
    end: usize,
    _marker: std::marker::PhantomData<T>,
}

impl<'a, T: Real> Parser<'a, T> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr<T>, ParseError> {
        let mut node = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    node = Expr::Binary(BinaryOp::Add, Box::new(node), Box::new(rhs));
                }
                Some(Token::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    node = Expr::Binary(BinaryOp::Sub, Box::new(node), Box::new(rhs));
                }
                _ => return Ok(node),
            }
        }
    }

    fn term(&mut self) -> Result<Expr<T>, ParseError> {
        let mut node = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    let rhs = self.factor()?;
                    node = Expr::Binary(BinaryOp::Mul, Box::new(node), Box::new(rhs));
                }
                Some(Token::Slash) => {
                    self.bump();
                    let rhs = self.factor()?;
                    node = Expr::Binary(BinaryOp::Div, Box::new(node), Box::new(rhs));
                }
                _ => return Ok(node),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr<T>, ParseError> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.bump();
            let inner = self.factor()?;
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr<T>, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.bump();
            let exponent = self.factor()?;
            return Ok(Expr::Binary(BinaryOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr<T>, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Some(Token::Number(v)) => Ok(Expr::Constant(lit(v))),
            Some(Token::Ident(name)) => match name.as_str() {
                "t" => Ok(Expr::Variable),
                "pi" => Ok(Expr::Constant(T::PI())),
                "e" => Ok(Expr::Constant(T::E())),
                "sin" | "cos" | "exp" | "ln" | "sqrt" | "abs" => {
                    let op = match name.as_str() {
                        "sin" => UnaryOp::Sin,
                        "cos" => UnaryOp::Cos,
                        "exp" => UnaryOp::Exp,
                        "ln" => UnaryOp::Ln,
                        "sqrt" => UnaryOp::Sqrt,
                        _ => UnaryOp::Abs,
                    };
                    let open = self.offset();
                    if !matches!(self.bump(), Some(Token::LParen)) {
                        return Err(ParseError::new(open, format!("expected '(' after \"{name}\"")));
                    }
                    let arg = self.expr()?;
                    let close = self.offset();
                    if !matches!(self.bump(), Some(Token::RParen)) {
                        return Err(ParseError::new(close, "expected ')'"));
                    }
                    Ok(Expr::Unary(op, Box::new(arg)))
                }
                _ => Err(ParseError::new(offset, format!("unknown identifier \"{name}\""))),
            },
            Some(Token::LParen) => {
                let inner = self.expr()?;
                let close = self.offset();
                if !matches!(self.bump(), Some(Token::RParen)) {
                    return Err(ParseError::new(close, "expected ')'"));
                }
                Ok(inner)
            }
            Some(Token::RParen) => Err(ParseError::new(offset, "unexpected ')'")),
            Some(_) => Err(ParseError::new(offset, "expected a number, name or '('")),
            None => Err(ParseError::new(offset, "unexpected end of input")),
        }
    }
}

/// Parses `text` into an expression tree.
pub fn parse<T: Real>(text: &str) -> Result<Expr<T>, ParseError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(ParseError::new(0, "empty input"));
    }
    let mut parser = Parser::<T> {
        tokens: &tokens,
        pos: 0,
        end: text.len(),
        _marker: std::marker::PhantomData,
    };
    let node = parser.expr()?;
    if parser.pos < tokens.len() {
        return Err(ParseError::new(parser.offset(), "unexpected trailing input"));
    }
    Ok(node)
}
