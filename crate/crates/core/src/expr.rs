//! Expressions in one variable `x`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := primary ('^' exponent)?
//! exponent := '-'? INTEGER ('^' exponent)? | '(' '-'? INTEGER ')'
//! primary  := NUMBER | 'x' | FUNC '(' expr ')' | '(' expr ')'
//! FUNC     := exp | log | sin | cos
//! ```
//!
//! `^` is right-associative and takes integer literals only; `x^2^3` is `x^8`.
//! Decimal literals are read as exact rationals (`0.25` is `1/4`).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::exactpoly::Polynomial;
use crate::jets::{JetFn, JetOp, TaylorJet};
use crate::qoperator::PointFn;
use crate::scalar::{parse_rational, Kind, Scalar};

/// Largest exponent magnitude accepted after `^`.
pub const MAX_EXPONENT: i64 = 1024;
/// Deepest nesting of parentheses and unary minus accepted by the parser.
pub const MAX_DEPTH: usize = 200;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => None,
        }
    }

    fn jet_fn(self) -> JetFn {
        match self {
            Func::Exp => JetFn::Exp,
            Func::Log => JetFn::Log,
            Func::Sin => JetFn::Sin,
            Func::Cos => JetFn::Cos,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExprNode {
    Literal(BigRational),
    Var,
    Neg(Box<ExprNode>),
    Binary(BinOp, Box<ExprNode>, Box<ExprNode>),
    Pow(Box<ExprNode>, i64),
    Call(Func, Box<ExprNode>),
}

impl ExprNode {
    pub fn literal(value: i64) -> Self {
        ExprNode::Literal(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn binary(op: BinOp, lhs: ExprNode, rhs: ExprNode) -> Self {
        ExprNode::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(func: Func, arg: ExprNode) -> Self {
        ExprNode::Call(func, Box::new(arg))
    }

    pub fn contains_var(&self) -> bool {
        match self {
            ExprNode::Literal(_) => false,
            ExprNode::Var => true,
            ExprNode::Neg(e) | ExprNode::Pow(e, _) | ExprNode::Call(_, e) => e.contains_var(),
            ExprNode::Binary(_, a, b) => a.contains_var() || b.contains_var(),
        }
    }

    /// True when the expression is built from polynomials, `exp`, `sin` and
    /// `cos` only, so it is defined on the whole plane.
    pub fn is_entire(&self) -> bool {
        match self {
            ExprNode::Literal(_) | ExprNode::Var => true,
            ExprNode::Neg(e) => e.is_entire(),
            ExprNode::Pow(e, p) => (*p >= 0 || !e.contains_var()) && e.is_entire(),
            ExprNode::Call(Func::Log, e) => !e.contains_var(),
            ExprNode::Call(_, e) => e.is_entire(),
            ExprNode::Binary(BinOp::Div, a, b) => a.is_entire() && !b.contains_var(),
            ExprNode::Binary(_, a, b) => a.is_entire() && b.is_entire(),
        }
    }

    /// Degree bound when the expression is a polynomial in `x` with rational
    /// coefficients; `None` otherwise.
    pub fn polynomial_degree(&self) -> Option<usize> {
        if !self.contains_var() {
            return match self {
                ExprNode::Call(..) => None,
                _ => self.is_entire().then_some(0),
            };
        }
        match self {
            ExprNode::Literal(_) => Some(0),
            ExprNode::Var => Some(1),
            ExprNode::Neg(e) => e.polynomial_degree(),
            ExprNode::Pow(e, p) => {
                let p = usize::try_from(*p).ok()?;
                e.polynomial_degree()?.checked_mul(p)
            }
            ExprNode::Call(..) => None,
            ExprNode::Binary(op, a, b) => {
                let (da, db) = (a.polynomial_degree()?, b.polynomial_degree()?);
                match op {
                    BinOp::Add | BinOp::Sub => Some(da.max(db)),
                    BinOp::Mul => da.checked_add(db),
                    BinOp::Div => (!b.contains_var()).then_some(da),
                }
            }
        }
    }

    /// Exact expansion of a polynomial expression.
    pub fn to_polynomial(&self) -> Result<Polynomial> {
        let degree = self.polynomial_degree().ok_or_else(|| {
            Error::InvalidArgument(format!("'{self}' is not a polynomial in x"))
        })?;
        let jet = self.eval_jet(&Scalar::zero(), degree, Kind::Exact)?;
        Polynomial::from_jet(&jet)
    }

    /// Taylor jet of the expression about `center`, computed bottom-up.
    /// Literals and the center are promoted to at least `kind`.
    pub fn eval_jet(&self, center: &Scalar, order: usize, kind: Kind) -> Result<TaylorJet> {
        let center = center.promote(kind);
        self.jet_rec(&center, order, kind)
    }

    /// Plain value at `x`: the order-0 jet.
    pub fn eval(&self, x: &Scalar) -> Result<Scalar> {
        let jet = self.eval_jet(x, 0, x.kind())?;
        Ok(jet.into_coeffs().swap_remove(0))
    }

    fn jet_rec(&self, center: &Scalar, order: usize, kind: Kind) -> Result<TaylorJet> {
        let located = |err: Error| match err {
            Error::Domain(msg) => Error::Domain(format!("in '{self}': {msg}")),
            Error::JetDivisionByZero => Error::Domain(format!("in '{self}': division by zero")),
            other => other,
        };
        match self {
            ExprNode::Literal(v) => Ok(TaylorJet::constant(
                Scalar::Exact(v.clone()).promote(kind),
                center.clone(),
                order,
            )),
            ExprNode::Var => Ok(TaylorJet::variable(center.clone(), order)),
            ExprNode::Neg(e) => Ok(e.jet_rec(center, order, kind)?.neg()),
            ExprNode::Binary(op, a, b) => {
                let a = a.jet_rec(center, order, kind)?;
                let b = b.jet_rec(center, order, kind)?;
                let op = match op {
                    BinOp::Add => JetOp::Add,
                    BinOp::Sub => JetOp::Sub,
                    BinOp::Mul => JetOp::Mul,
                    BinOp::Div => JetOp::Div,
                };
                a.apply_op(op, &b).map_err(located)
            }
            ExprNode::Pow(e, p) => e
                .jet_rec(center, order, kind)?
                .apply(JetFn::IntPow(*p))
                .map_err(located),
            ExprNode::Call(func, e) => e
                .jet_rec(center, order, kind)?
                .apply(func.jet_fn())
                .map_err(located),
        }
    }

    /// Wraps the expression as a [`PointFn`] with a jet oracle.
    ///
    /// Entire expressions default to an infinite radius; anything with a
    /// variable denominator, a negative power or a logarithm needs `radius`.
    pub fn to_point_fn(&self, radius: Option<f64>) -> Result<PointFn> {
        let radius = match radius {
            Some(r) => r,
            None if self.is_entire() => f64::INFINITY,
            None => {
                return Err(Error::InvalidArgument(format!(
                    "'{self}' may be singular; an explicit domain radius is required"
                )))
            }
        };
        let eval_expr = self.clone();
        let jet_expr = self.clone();
        Ok(PointFn::new(move |x: &Scalar| eval_expr.eval(x), radius)?
            .with_jet_oracle(move |c: &Scalar, order| jet_expr.eval_jet(c, order, c.kind())))
    }

    fn precedence(&self) -> u8 {
        match self {
            ExprNode::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            ExprNode::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            ExprNode::Neg(_) => 3,
            ExprNode::Pow(..) => 4,
            ExprNode::Literal(v) if v.is_negative() || !is_decimal(v) => 0,
            _ => 5,
        }
    }
}

fn is_decimal(v: &BigRational) -> bool {
    let mut d = v.denom().clone();
    for p in [2u32, 5] {
        let p = BigInt::from(p);
        while d.is_multiple_of(&p) {
            d /= &p;
        }
    }
    d.is_one()
}

fn write_literal(f: &mut fmt::Formatter<'_>, v: &BigRational) -> fmt::Result {
    if v.is_integer() {
        return write!(f, "{}", v.numer());
    }
    if !is_decimal(v) {
        return write!(f, "{}/{}", v.numer(), v.denom());
    }
    // Terminating decimal: scale by 10^k until integral.
    let sign = if v.is_negative() { "-" } else { "" };
    let mut scaled = v.abs();
    let mut places = 0usize;
    while !scaled.is_integer() {
        scaled *= BigRational::from_integer(BigInt::from(10));
        places += 1;
    }
    let digits = scaled.numer().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (int, frac) = digits.split_at(digits.len() - places);
    write!(f, "{sign}{int}.{frac}")
}

impl fmt::Display for ExprNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &ExprNode, parens: bool| {
            if parens {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            ExprNode::Literal(v) => write_literal(f, v),
            ExprNode::Var => f.write_str("x"),
            ExprNode::Neg(e) => {
                f.write_str("-")?;
                wrap(f, e, e.precedence() < 3)
            }
            ExprNode::Binary(op, a, b) => {
                let prec = self.precedence();
                wrap(f, a, a.precedence() < prec)?;
                f.write_str(match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                })?;
                wrap(f, b, b.precedence() <= prec)
            }
            ExprNode::Pow(e, p) => {
                wrap(f, e, e.precedence() <= 4)?;
                write!(f, "^{p}")
            }
            ExprNode::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(BigRational),
    Ident(String),
    Int(String),
    Sym(char),
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(v) => format!("number {v}"),
            Token::Int(s) => format!("number {s}"),
            Token::Ident(s) => format!("'{s}'"),
            Token::Sym(c) => format!("'{c}'"),
            Token::End => "end of input".into(),
        }
    }
}

fn syntax(position: usize, expected: &str, found: String) -> Error {
    Error::Syntax {
        position,
        expected: expected.into(),
        found,
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let lexeme: String = chars[start..i].iter().collect();
            if lexeme.bytes().all(|b| b.is_ascii_digit()) {
                tokens.push((start, Token::Int(lexeme)));
            } else {
                let value = parse_rational(&lexeme)
                    .filter(|_| lexeme.matches('.').count() == 1)
                    .ok_or_else(|| syntax(start, "a number", format!("'{lexeme}'")))?;
                tokens.push((start, Token::Number(value)));
            }
        } else if c.is_ascii_alphabetic() {
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            tokens.push((start, Token::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            tokens.push((start, Token::Sym(c)));
            i += 1;
        } else {
            return Err(syntax(start, "a token", format!("'{c}'")));
        }
    }
    tokens.push((chars.len(), Token::End));
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].1
    }

    fn position(&self) -> usize {
        self.tokens[self.pos].0
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos].1.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &str) -> Error {
        syntax(self.position(), expected, self.peek().describe())
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == &Token::Sym(c) {
            self.advance();
            Ok(())
        } else {
            Err(self.error(&format!("'{c}'")))
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(self.error("shallower nesting"))
        } else {
            Ok(())
        }
    }

    fn expr(&mut self) -> Result<ExprNode> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Token::Sym('+') => BinOp::Add,
                Token::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            lhs = ExprNode::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<ExprNode> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Token::Sym('*') => BinOp::Mul,
                Token::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            lhs = ExprNode::binary(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<ExprNode> {
        if self.peek() == &Token::Sym('-') {
            self.advance();
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(ExprNode::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprNode> {
        let base = self.primary()?;
        if self.peek() != &Token::Sym('^') {
            return Ok(base);
        }
        self.advance();
        let exponent = self.exponent()?;
        Ok(ExprNode::Pow(Box::new(base), exponent))
    }

    fn signed_int(&mut self) -> Result<i64> {
        let negative = self.peek() == &Token::Sym('-');
        if negative {
            self.advance();
        }
        let start = self.position();
        let Token::Int(digits) = self.peek().clone() else {
            return Err(self.error("an integer exponent"));
        };
        self.advance();
        let value: i64 = digits
            .parse()
            .ok()
            .filter(|v| *v <= MAX_EXPONENT)
            .ok_or_else(|| syntax(start, "an exponent of at most 1024", digits.clone()))?;
        Ok(if negative { -value } else { value })
    }

    fn exponent(&mut self) -> Result<i64> {
        if self.peek() == &Token::Sym('(') {
            self.advance();
            let value = self.signed_int()?;
            self.expect(')')?;
            return Ok(value);
        }
        let start = self.position();
        let base = self.signed_int()?;
        if self.peek() != &Token::Sym('^') {
            return Ok(base);
        }
        self.advance();
        self.enter()?;
        let tower = self.exponent()?;
        self.depth -= 1;
        let value = u32::try_from(tower)
            .ok()
            .and_then(|t| base.checked_pow(t))
            .filter(|v| v.abs() <= MAX_EXPONENT)
            .ok_or_else(|| syntax(start, "an integer exponent of at most 1024", format!("{base}^{tower}")))?;
        Ok(value)
    }

    fn primary(&mut self) -> Result<ExprNode> {
        match self.peek().clone() {
            Token::Int(digits) => {
                self.advance();
                let value: BigInt = digits.parse().expect("lexer yields digits");
                Ok(ExprNode::Literal(BigRational::from_integer(value)))
            }
            Token::Number(value) => {
                self.advance();
                Ok(ExprNode::Literal(value))
            }
            Token::Ident(name) if name == "x" => {
                self.advance();
                Ok(ExprNode::Var)
            }
            Token::Ident(name) => {
                let Some(func) = Func::from_name(&name) else {
                    return Err(self.error("'x', a number, '(' or one of exp, log, sin, cos"));
                };
                self.advance();
                self.expect('(')?;
                self.enter()?;
                let arg = self.expr()?;
                self.depth -= 1;
                self.expect(')')?;
                Ok(ExprNode::call(func, arg))
            }
            Token::Sym('(') => {
                self.advance();
                self.enter()?;
                let inner = self.expr()?;
                self.depth -= 1;
                self.expect(')')?;
                Ok(inner)
            }
            _ => Err(self.error("'x', a number, '(' or a function call")),
        }
    }
}

/// Parses an expression; errors carry a 0-based character position.
pub fn parse(text: &str) -> Result<ExprNode> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        depth: 0,
    };
    let expr = parser.expr()?;
    if parser.peek() != &Token::End {
        return Err(parser.error("an operator or end of input"));
    }
    Ok(expr)
}

impl FromStr for ExprNode {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        parse(text)
    }
}
