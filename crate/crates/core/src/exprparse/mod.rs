//! Arithmetic expressions over `x1..xd` and `t1..tn`.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | var | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Evaluation is generic over [`Scalar`], so the same tree yields values
//! (`f64`) and first and second partials ([`HyperDual`]).

mod dual;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use dual::{gradient, second_partial, HyperDual, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Var {
    /// Chart coordinate `x{k}`, 1-based.
    X(usize),
    /// Parameter `t{k}`, 1-based.
    T(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(k) => write!(f, "x{}", k),
            Var::T(k) => write!(f, "t{}", k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Tanh,
}

impl Func {
    const ALL: [(Func, &'static str); 6] = [
        (Func::Sin, "sin"),
        (Func::Cos, "cos"),
        (Func::Exp, "exp"),
        (Func::Log, "log"),
        (Func::Sqrt, "sqrt"),
        (Func::Tanh, "tanh"),
    ];

    fn name(self) -> &'static str {
        Func::ALL.iter().find(|(g, _)| *g == self).map(|(_, n)| *n).expect("every function is named")
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().find(|(_, n)| *n == name).map(|(g, _)| *g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable {0}")]
    Unbound(Var),
    #[error("division by zero")]
    DivisionByZero,
    #[error("log of nonpositive value {0}")]
    LogDomain(f64),
    #[error("sqrt of negative value {0}")]
    SqrtDomain(f64),
    #[error("power with negative base {0} and non-integer exponent")]
    PowDomain(f64),
    #[error("non-finite result")]
    NonFinite,
}

/// Values for `x1..` and `t1..`.
#[derive(Debug, Clone, Copy)]
pub struct Point<'a, S> {
    pub x: &'a [S],
    pub t: &'a [S],
}

impl<'a, S> Point<'a, S> {
    pub fn new(x: &'a [S], t: &'a [S]) -> Self {
        Point { x, t }
    }
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let exponent = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.word(),
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            self.pos = start;
            return Err(self.error("malformed number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = mark;
                return Err(self.error("malformed exponent"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ASCII digits");
        text.parse::<f64>().map(Expr::Num).map_err(|_| ParseError { offset: start, message: "malformed number".into() })
    }

    fn word(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ASCII identifier");
        if let Some(func) = Func::from_name(word) {
            if !self.eat(b'(') {
                return Err(self.error("expected '(' after function name"));
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        let bad = || ParseError { offset: start, message: format!("unknown identifier '{}'", word) };
        let (head, index) = word.split_at(1);
        let k: usize = index.parse().map_err(|_| bad())?;
        if k == 0 || index.starts_with('0') {
            return Err(bad());
        }
        match head {
            "x" => Ok(Expr::Var(Var::X(k))),
            "t" => Ok(Expr::Var(Var::T(k))),
            _ => Err(bad()),
        }
    }
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(op, _, _) => op.precedence(),
            Expr::Neg(_) => 3,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(_, _) => 5,
        }
    }

    /// Largest `x` and `t` indices used, 0 when absent.
    pub fn max_indices(&self) -> (usize, usize) {
        match self {
            Expr::Num(_) => (0, 0),
            Expr::Var(Var::X(k)) => (*k, 0),
            Expr::Var(Var::T(k)) => (0, *k),
            Expr::Neg(a) | Expr::Call(_, a) => a.max_indices(),
            Expr::Bin(_, a, b) => {
                let (p, q) = (a.max_indices(), b.max_indices());
                (p.0.max(q.0), p.1.max(q.1))
            }
        }
    }

    pub fn eval<S: Scalar>(&self, at: Point<'_, S>) -> Result<S, EvalError> {
        let r = self.eval_inner(at)?;
        if r.re().is_finite() {
            Ok(r)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    fn eval_inner<S: Scalar>(&self, at: Point<'_, S>) -> Result<S, EvalError> {
        Ok(match self {
            Expr::Num(c) => S::constant(*c),
            Expr::Var(v) => {
                let slot = match v {
                    Var::X(k) => at.x.get(k - 1),
                    Var::T(k) => at.t.get(k - 1),
                };
                *slot.ok_or(EvalError::Unbound(*v))?
            }
            Expr::Neg(a) => -a.eval_inner(at)?,
            Expr::Call(func, a) => {
                let u = a.eval_inner(at)?;
                match func {
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Exp => u.exp(),
                    Func::Tanh => u.tanh(),
                    Func::Log if u.re() > 0.0 => u.ln(),
                    Func::Log => return Err(EvalError::LogDomain(u.re())),
                    Func::Sqrt if u.re() > 0.0 => u.sqrt(),
                    Func::Sqrt if u.re() == 0.0 => u.chain(0.0, f64::INFINITY, f64::NEG_INFINITY),
                    Func::Sqrt => return Err(EvalError::SqrtDomain(u.re())),
                }
            }
            Expr::Bin(op, a, b) => {
                let u = a.eval_inner(at)?;
                if *op == BinOp::Pow {
                    if let Some(c) = b.constant_value() {
                        if u.re() < 0.0 && c.fract() != 0.0 {
                            return Err(EvalError::PowDomain(u.re()));
                        }
                        if u.re() == 0.0 && c < 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        return Ok(u.powf(c));
                    }
                    let w = b.eval_inner(at)?;
                    if u.re() <= 0.0 {
                        return Err(EvalError::PowDomain(u.re()));
                    }
                    return Ok((w * u.ln()).exp());
                }
                let w = b.eval_inner(at)?;
                match op {
                    BinOp::Add => u + w,
                    BinOp::Sub => u - w,
                    BinOp::Mul => u * w,
                    BinOp::Div if w.re() == 0.0 => return Err(EvalError::DivisionByZero),
                    BinOp::Div => u / w,
                    BinOp::Pow => unreachable!("handled above"),
                }
            }
        })
    }

    /// The value of a variable-free subtree.
    fn constant_value(&self) -> Option<f64> {
        if self.max_indices() != (0, 0) {
            return None;
        }
        self.eval_inner::<f64>(Point::new(&[], &[])).ok()
    }

    pub fn value(&self, x: &[f64], t: &[f64]) -> Result<f64, EvalError> {
        self.eval(Point::new(x, t))
    }

    /// `∂f/∂v`.
    pub fn d1(&self, v: Var, x: &[f64], t: &[f64]) -> Result<f64, EvalError> {
        Ok(self.jet(v, v, x, t)?.e1)
    }

    /// `∂²f/∂a∂b`.
    pub fn d2(&self, a: Var, b: Var, x: &[f64], t: &[f64]) -> Result<f64, EvalError> {
        Ok(self.jet(a, b, x, t)?.e12)
    }

    /// Value, `∂_a`, `∂_b` and `∂_a∂_b` in one pass.
    pub fn jet(&self, a: Var, b: Var, x: &[f64], t: &[f64]) -> Result<HyperDual, EvalError> {
        let seed = |v: Var, val: f64| HyperDual::variable(val, v == a, v == b);
        let xs: Vec<HyperDual> = x.iter().enumerate().map(|(k, &val)| seed(Var::X(k + 1), val)).collect();
        let ts: Vec<HyperDual> = t.iter().enumerate().map(|(k, &val)| seed(Var::T(k + 1), val)).collect();
        self.eval(Point::new(&xs, &ts))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool| {
            if paren {
                write!(f, "({})", e)
            } else {
                write!(f, "{}", e)
            }
        };
        match self {
            Expr::Num(c) => write!(f, "{}", c),
            Expr::Var(v) => write!(f, "{}", v),
            Expr::Call(func, a) => write!(f, "{}({})", func.name(), a),
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, a.precedence() < 3)
            }
            Expr::Bin(BinOp::Pow, a, b) => {
                wrap(f, a, a.precedence() < 5)?;
                write!(f, "^")?;
                wrap(f, b, b.precedence() < 3)
            }
            Expr::Bin(op, a, b) => {
                let p = op.precedence();
                wrap(f, a, a.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                wrap(f, b, b.precedence() <= p)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(s: &str, x: &[f64], t: &[f64]) -> f64 {
        parse(s).unwrap().value(x, t).unwrap()
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_eq!(eval("2*3+1", &[], &[]), 7.0);
        assert_eq!(eval("2^3^2", &[], &[]), 512.0);
        assert_eq!(eval("-2^2", &[], &[]), -4.0);
        assert_eq!(eval("2^-1", &[], &[]), 0.5);
        assert_eq!(eval("8/4/2", &[], &[]), 1.0);
        assert_eq!(eval("1 - 2 - 3", &[], &[]), -4.0);
        assert_eq!(eval("1.5e1 + .5", &[], &[]), 15.5);
    }

    #[test]
    fn variables_and_functions() {
        assert_eq!(eval("x1^2 + sin(t1)", &[0.0], &[0.0]), 0.0);
        assert_eq!(eval("exp(x2) * cos(0)", &[5.0, 0.0], &[]), 1.0);
    }

    #[test]
    fn error_offsets() {
        assert_eq!(parse("1/(").unwrap_err().offset, 3);
        assert_eq!(parse("2 + y1").unwrap_err().offset, 4);
        assert_eq!(parse("x0").unwrap_err().offset, 0);
        assert_eq!(parse("sin 2").unwrap_err().offset, 4);
        assert_eq!(parse("(1+2").unwrap_err().offset, 4);
        assert_eq!(parse("1 2").unwrap_err().offset, 2);
    }

    #[test]
    fn domain_errors() {
        let e = parse("log(x1)").unwrap();
        assert_eq!(e.value(&[0.0], &[]), Err(EvalError::LogDomain(0.0)));
        assert_eq!(parse("1/x1").unwrap().value(&[0.0], &[]), Err(EvalError::DivisionByZero));
        assert!(matches!(parse("x2").unwrap().value(&[1.0], &[]), Err(EvalError::Unbound(Var::X(2)))));
    }

    #[test]
    fn derivatives() {
        let e = parse("x1^2").unwrap();
        assert_eq!(e.d1(Var::X(1), &[3.0], &[]).unwrap(), 6.0);
        let s = parse("sin(t1)").unwrap();
        assert_eq!(s.d2(Var::T(1), Var::T(1), &[], &[0.0]).unwrap(), 0.0);
        let m = parse("x1^3 * exp(t1)").unwrap();
        let d = m.d2(Var::X(1), Var::T(1), &[2.0], &[0.0]).unwrap();
        assert!((d - 12.0).abs() < 1e-12);
    }

    #[test]
    fn printing_round_trips() {
        for s in ["-(x1 + 2)^2", "(x1 - t1) - (2 - 3)", "x1 / (x2 * 3)", "(-x1)^2", "2^-x1^2", "--x1", "sqrt(x1 * -x2)"] {
            let e = parse(s).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{}", s);
        }
    }
}
