//! Polynomials in z, zbar and |z|^2 with complex constant coefficients.
//!
//! Grammar:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | '+' unary | power
//! power   := atom ('^' integer)?
//! atom    := number | 'i' | 'z' | 'zbar' | '|z|^2' | '(' sum ')'
//! ```
//!
//! Division is allowed only by constant subexpressions.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("expression error at offset {offset}: {message}")]
pub struct ExprError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Z,
    Zbar,
    AbsSq,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u32 = 64;

impl Expr {
    pub fn parse(src: &str) -> Result<Self, ExprError> {
        let tokens = lex(src)?;
        let mut p = Parser { tokens, pos: 0, len: src.len() };
        let e = p.sum()?;
        if let Some(t) = p.peek() {
            return Err(p.error_at(t.offset, format!("unexpected {}", t.kind)));
        }
        Ok(e)
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Z | Expr::Zbar | Expr::AbsSq => false,
            Expr::Neg(a) | Expr::Pow(a, _) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.is_constant() && b.is_constant(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Z => z,
            Expr::Zbar => z.conj(),
            Expr::AbsSq => Complex64::new(z.norm_sqr(), 0.0),
            Expr::Neg(a) => -a.eval(z),
            Expr::Add(a, b) => a.eval(z) + b.eval(z),
            Expr::Sub(a, b) => a.eval(z) - b.eval(z),
            Expr::Mul(a, b) => a.eval(z) * b.eval(z),
            Expr::Div(a, b) => a.eval(z) / b.eval(z),
            Expr::Pow(a, k) => a.eval(z).powu(*k),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Num(f64),
    I,
    Z,
    Zbar,
    AbsSq,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kind::Num(x) => write!(f, "number {x}"),
            Kind::I => f.write_str("'i'"),
            Kind::Z => f.write_str("'z'"),
            Kind::Zbar => f.write_str("'zbar'"),
            Kind::AbsSq => f.write_str("'|z|^2'"),
            Kind::Plus => f.write_str("'+'"),
            Kind::Minus => f.write_str("'-'"),
            Kind::Star => f.write_str("'*'"),
            Kind::Slash => f.write_str("'/'"),
            Kind::Caret => f.write_str("'^'"),
            Kind::LParen => f.write_str("'('"),
            Kind::RParen => f.write_str("')'"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: Kind,
    offset: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Kind::Plus),
            b'-' => Some(Kind::Minus),
            b'*' => Some(Kind::Star),
            b'/' => Some(Kind::Slash),
            b'^' => Some(Kind::Caret),
            b'(' => Some(Kind::LParen),
            b')' => Some(Kind::RParen),
            _ => None,
        };
        if let Some(kind) = simple {
            out.push(Token { kind, offset: start });
            i += 1;
            continue;
        }
        if src[i..].starts_with("|z|^2") {
            out.push(Token { kind: Kind::AbsSq, offset: start });
            i += 5;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let v: f64 =
                text.parse().map_err(|_| ExprError { offset: start, message: format!("malformed number '{text}'") })?;
            out.push(Token { kind: Kind::Num(v), offset: start });
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let kind = match &src[start..i] {
                "z" => Kind::Z,
                "zbar" => Kind::Zbar,
                "i" => Kind::I,
                other => return Err(ExprError { offset: start, message: format!("unknown identifier '{other}'") }),
            };
            out.push(Token { kind, offset: start });
            continue;
        }
        let ch = src[i..].chars().next().unwrap_or('?');
        return Err(ExprError { offset: start, message: format!("unexpected character '{ch}'") });
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn error_at(&self, offset: usize, message: String) -> ExprError {
        ExprError { offset, message }
    }

    fn eat(&mut self, kind: &Kind) -> bool {
        if self.peek().is_some_and(|t| &t.kind == kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.product()?;
        loop {
            if self.eat(&Kind::Plus) {
                acc = Expr::Add(Box::new(acc), Box::new(self.product()?));
            } else if self.eat(&Kind::Minus) {
                acc = Expr::Sub(Box::new(acc), Box::new(self.product()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(&Kind::Star) {
                acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
            } else if let Some(offset) = self.peek().filter(|t| t.kind == Kind::Slash).map(|t| t.offset) {
                self.pos += 1;
                let rhs = self.unary()?;
                if !rhs.is_constant() {
                    return Err(self.error_at(offset, "division is only allowed by constants".into()));
                }
                if rhs.eval(Complex64::new(0.0, 0.0)) == Complex64::new(0.0, 0.0) {
                    return Err(self.error_at(offset, "division by zero".into()));
                }
                acc = Expr::Div(Box::new(acc), Box::new(rhs));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat(&Kind::Minus) {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(&Kind::Plus) {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if !self.eat(&Kind::Caret) {
            return Ok(base);
        }
        match self.peek().cloned() {
            Some(Token { kind: Kind::Num(v), offset }) => {
                self.pos += 1;
                if v.fract() != 0.0 || !(0.0..=MAX_EXPONENT as f64).contains(&v) {
                    return Err(
                        self.error_at(offset, format!("exponent must be an integer in 0..={MAX_EXPONENT}, got {v}"))
                    );
                }
                Ok(Expr::Pow(Box::new(base), v as u32))
            }
            Some(t) => Err(self.error_at(t.offset, format!("expected an exponent, found {}", t.kind))),
            None => Err(self.error_at(self.len, "expected an exponent".into())),
        }
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let Some(t) = self.peek().cloned() else {
            return Err(self.error_at(self.len, "unexpected end of expression".into()));
        };
        self.pos += 1;
        match t.kind {
            Kind::Num(v) => Ok(Expr::Const(Complex64::new(v, 0.0))),
            Kind::I => Ok(Expr::Const(Complex64::new(0.0, 1.0))),
            Kind::Z => Ok(Expr::Z),
            Kind::Zbar => Ok(Expr::Zbar),
            Kind::AbsSq => Ok(Expr::AbsSq),
            Kind::LParen => {
                let e = self.sum()?;
                if !self.eat(&Kind::RParen) {
                    let offset = self.peek().map_or(self.len, |t| t.offset);
                    return Err(self.error_at(offset, "expected ')'".into()));
                }
                Ok(e)
            }
            other => Err(self.error_at(t.offset, format!("unexpected {other}"))),
        }
    }
}
