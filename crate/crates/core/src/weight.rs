//! Regression weight functions `w(x)` given as text.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := unary ('^' factor)?          right-associative
//! unary   := '-' unary | primary
//! primary := number | 'x' | 'exp' '(' expr ')' | '(' expr ')'
//! ```
//!
//! Note that `-x^2` parses as `(-x)^2`; write `-(x^2)` or `0-x^2` for the
//! other reading.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{EvalError, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Bin(op, Box::new(lhs), Box::new(rhs))
    }

    /// True when the expression does not mention `x`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::X => false,
            Expr::Neg(e) | Expr::Exp(e) => e.is_constant(),
            Expr::Bin(_, l, r) => l.is_constant() && r.is_constant(),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Num(c) => *c,
            Expr::X => x,
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Exp(e) => e.eval(x)?.exp(),
            Expr::Bin(op, l, r) => {
                let a = l.eval(x)?;
                let b = r.eval(x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                    BinOp::Pow => power(a, b)?,
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite { value: v })
        }
    }

    /// Forward-mode value and derivative `(f(x), f'(x))`.
    ///
    /// Only the value is checked for validity; the derivative may be
    /// infinite where `f` has a vertical tangent (e.g. `(1-x)^0.5` at 1).
    pub fn eval_dual(&self, x: f64) -> Result<(f64, f64), EvalError> {
        let (v, d) = match self {
            Expr::Num(c) => (*c, 0.0),
            Expr::X => (x, 1.0),
            Expr::Neg(e) => {
                let (v, d) = e.eval_dual(x)?;
                (-v, -d)
            }
            Expr::Exp(e) => {
                let (v, d) = e.eval_dual(x)?;
                let ev = v.exp();
                (ev, ev * d)
            }
            Expr::Bin(op, l, r) => {
                let (a, da) = l.eval_dual(x)?;
                let (b, db) = r.eval_dual(x)?;
                match op {
                    BinOp::Add => (a + b, da + db),
                    BinOp::Sub => (a - b, da - db),
                    BinOp::Mul => (a * b, da * b + a * db),
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        (a / b, (da * b - a * db) / (b * b))
                    }
                    BinOp::Pow => {
                        let v = power(a, b)?;
                        let d = if db == 0.0 {
                            if da == 0.0 {
                                0.0
                            } else {
                                b * power_unchecked(a, b - 1.0) * da
                            }
                        } else {
                            v * (db * a.ln() + b * da / a)
                        };
                        (v, d)
                    }
                }
            }
        };
        if v.is_finite() {
            Ok((v, d))
        } else {
            Err(EvalError::NonFinite { value: v })
        }
    }
}

fn power(base: f64, exponent: f64) -> Result<f64, EvalError> {
    if base < 0.0 && exponent.fract() != 0.0 {
        return Err(EvalError::NegativeBaseFractionalPower { base, exponent });
    }
    Ok(power_unchecked(base, exponent))
}

fn power_unchecked(base: f64, exponent: f64) -> f64 {
    if exponent == 0.0 {
        1.0
    } else if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
        base.powi(exponent as i32)
    } else {
        base.powf(exponent)
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized form; re-parsing it yields an equal tree up to
    /// the placement of negations.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => {
                write!(f, "(-{:?})", -c)
            }
            Expr::Num(c) => write!(f, "{c:?}"),
            Expr::X => write!(f, "x"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Exp(e) => write!(f, "exp({e})"),
            Expr::Bin(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
        }
    }
}

/// A parsed regression weight `w(x)` together with its source text.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightFn {
    expr: Arc<Expr>,
    source: String,
}

impl WeightFn {
    pub fn parse(src: &str) -> Result<Self, ParseError> {
        let expr = Parser::new(src).parse()?;
        Ok(Self {
            expr: Arc::new(expr),
            source: src.to_string(),
        })
    }

    pub fn from_expr(expr: Expr) -> Self {
        let source = expr.to_string();
        Self {
            expr: Arc::new(expr),
            source,
        }
    }

    /// The constant weight `w ≡ 1`.
    pub fn unit() -> Self {
        Self::from_expr(Expr::Num(1.0))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Canonical fully parenthesized text.
    pub fn canonical(&self) -> String {
        self.expr.to_string()
    }

    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        self.expr.eval(x)
    }

    pub fn eval_dual(&self, x: f64) -> Result<(f64, f64), EvalError> {
        self.expr.eval_dual(x)
    }

    /// `c · w`.
    pub fn scaled(&self, c: f64) -> Self {
        Self::from_expr(Expr::bin(BinOp::Mul, Expr::Num(c), (*self.expr).clone()))
    }
}

impl FromStr for WeightFn {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for WeightFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

/// Outcome of sampling a weight for strict positivity on an open interval.
#[derive(Clone, Debug, PartialEq)]
pub enum Positivity {
    Pass,
    NonPositive { x: f64, value: f64 },
    Invalid { x: f64, error: EvalError },
}

impl Positivity {
    pub fn is_pass(&self) -> bool {
        matches!(self, Positivity::Pass)
    }
}

impl fmt::Display for Positivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Positivity::Pass => write!(f, "weight is positive on the open interval"),
            Positivity::NonPositive { x, value } => {
                write!(f, "weight is not positive at x = {x} (w = {value})")
            }
            Positivity::Invalid { x, error } => {
                write!(f, "weight is undefined at x = {x}: {error}")
            }
        }
    }
}

pub const DEFAULT_POSITIVITY_GRID: usize = 10_001;

/// Samples `w` at `grid` midpoints of a uniform partition of `(a, b)` and
/// reports the first point where it is not finite and strictly positive.
pub fn positivity_check(w: &WeightFn, a: f64, b: f64, grid: usize) -> Positivity {
    let grid = grid.max(2);
    let step = (b - a) / grid as f64;
    for i in 0..grid {
        let x = a + (i as f64 + 0.5) * step;
        match w.eval(x) {
            Ok(v) if v > 0.0 => {}
            Ok(v) => return Positivity::NonPositive { x, value: v },
            Err(error) => return Positivity::Invalid { x, error },
        }
    }
    Positivity::Pass
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    tok: Tok,
    tok_start: usize,
}

const PRIMARY_START: &[&str] = &["number", "x", "exp", "(", "-"];

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            pos: 0,
            tok: Tok::End,
            tok_start: 0,
        }
    }

    fn parse(mut self) -> Result<Expr, ParseError> {
        self.advance()?;
        let e = self.expr()?;
        if self.tok != Tok::End {
            return Err(self.unexpected(&["+", "-", "*", "/", "^", "end of input"]));
        }
        Ok(e)
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        ParseError::Syntax {
            offset: self.tok_start,
            expected: expected.to_vec(),
            found: self.tok.to_string(),
        }
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            self.tok = Tok::End;
            return Ok(());
        };
        if c.is_ascii_digit() || c == b'.' {
            self.tok = Tok::Num(self.number()?);
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.pos < bytes.len()
                && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
            {
                self.pos += 1;
            }
            self.tok = Tok::Ident(self.src[start..self.pos].to_string());
        } else if b"+-*/^()".contains(&c) {
            self.pos += 1;
            self.tok = Tok::Sym(c as char);
        } else {
            let ch = self.src[self.pos..].chars().next().unwrap_or('?');
            return Err(ParseError::Syntax {
                offset: self.pos,
                expected: PRIMARY_START.to_vec(),
                found: format!("`{ch}`"),
            });
        }
        Ok(())
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let bytes = self.src.as_bytes();
        let start = self.pos;
        let digits = |pos: &mut usize| {
            let s = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            *pos - s
        };
        let mut n = digits(&mut self.pos);
        if bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(&mut self.pos);
        }
        if n == 0 {
            return Err(ParseError::Syntax {
                offset: start,
                expected: vec!["digit"],
                found: "`.`".into(),
            });
        }
        if matches!(bytes.get(self.pos), Some(b'e' | b'E')) {
            let mut p = self.pos + 1;
            if matches!(bytes.get(p), Some(b'+' | b'-')) {
                p += 1;
            }
            if digits(&mut p) == 0 {
                return Err(ParseError::Syntax {
                    offset: p,
                    expected: vec!["exponent digits"],
                    found: describe_at(self.src, p),
                });
            }
            self.pos = p;
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| ParseError::Syntax {
                offset: start,
                expected: vec!["number"],
                found: self.src[start..self.pos].to_string(),
            })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance()?;
            lhs = Expr::bin(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.tok {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.advance()?;
            lhs = Expr::bin(op, lhs, self.factor()?);
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.unary()?;
        if self.tok == Tok::Sym('^') {
            self.advance()?;
            let exponent = self.factor()?;
            return Ok(Expr::bin(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Sym('-') {
            self.advance()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.advance()?;
                Ok(Expr::Num(v))
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => {
                    self.advance()?;
                    Ok(Expr::X)
                }
                "exp" => {
                    self.advance()?;
                    self.expect_open()?;
                    let inner = self.expr()?;
                    self.expect_close()?;
                    Ok(Expr::Exp(Box::new(inner)))
                }
                _ => Err(ParseError::UnknownIdentifier {
                    name,
                    offset: self.tok_start,
                }),
            },
            Tok::Sym('(') => {
                self.advance()?;
                let inner = self.expr()?;
                self.expect_close()?;
                Ok(inner)
            }
            _ => Err(self.unexpected(PRIMARY_START)),
        }
    }

    fn expect_open(&mut self) -> Result<(), ParseError> {
        if self.tok != Tok::Sym('(') {
            return Err(self.unexpected(&["("]));
        }
        self.advance()
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        if self.tok != Tok::Sym(')') {
            return Err(self.unexpected(&[")", "+", "-", "*", "/", "^"]));
        }
        self.advance()
    }
}

fn describe_at(src: &str, pos: usize) -> String {
    match src[pos.min(src.len())..].chars().next() {
        Some(c) => format!("`{c}`"),
        None => "end of input".into(),
    }
}
