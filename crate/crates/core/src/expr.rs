//! Scalar expressions over `(t, x1, x2, x3)` and named parameters.
//!
//! Grammar (recursive descent, whitespace insensitive):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?            right associative
//! primary := number | variable | param | 'pi'
//!          | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | log | sqrt | abs
//! ```
//!
//! `^` binds tighter than unary minus, so `-2^2` is `-4`.
//!
//! Positions are character offsets into the source.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Named real parameters visible to an expression.
pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    T,
    X1,
    X2,
    X3,
}

impl Var {
    fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::X1 => "x1",
            Var::X2 => "x2",
            Var::X3 => "x3",
        }
    }

    fn from_name(s: &str) -> Option<Var> {
        match s {
            "t" => Some(Var::T),
            "x1" => Some(Var::X1),
            "x2" => Some(Var::X2),
            "x3" => Some(Var::X3),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl UnaryOp {
    fn function(name: &str) -> Option<UnaryOp> {
        Some(match name {
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "exp" => UnaryOp::Exp,
            "log" => UnaryOp::Log,
            "sqrt" => UnaryOp::Sqrt,
            "abs" => UnaryOp::Abs,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

/// Expression tree. Every node remembers the source offset it was parsed
/// from; equality compares structure only.
#[derive(Debug, Clone)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Param { name: String, pos: usize },
    Unary { op: UnaryOp, arg: Box<Expr>, pos: usize },
    Binary { op: BinaryOp, lhs: Box<Expr>, rhs: Box<Expr>, pos: usize },
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Expr::Const(a), Expr::Const(b)) => a.to_bits() == b.to_bits(),
            (Expr::Var(a), Expr::Var(b)) => a == b,
            (Expr::Param { name: a, .. }, Expr::Param { name: b, .. }) => a == b,
            (
                Expr::Unary { op: oa, arg: aa, .. },
                Expr::Unary { op: ob, arg: ab, .. },
            ) => oa == ob && aa == ab,
            (
                Expr::Binary { op: oa, lhs: la, rhs: ra, .. },
                Expr::Binary { op: ob, lhs: lb, rhs: rb, .. },
            ) => oa == ob && la == lb && ra == rb,
            _ => false,
        }
    }
}

/// Fully parenthesised rendering; reparses to an equal tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Param { name, .. } => f.write_str(name),
            Expr::Unary { op: UnaryOp::Neg, arg, .. } => write!(f, "(-{arg})"),
            Expr::Unary { op, arg, .. } => write!(f, "{}({arg})", op.name()),
            Expr::Binary { op, lhs, rhs, .. } => write!(f, "({lhs} {} {rhs})", op.symbol()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at offset {position}: {message} (expected {})", expected.join(" | "))]
pub struct ParseError {
    pub position: usize,
    pub message: String,
    pub expected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalErrorKind {
    UnboundParameter(String),
    Domain(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("evaluation error at offset {position}: {}", match kind {
    EvalErrorKind::UnboundParameter(n) => format!("unbound parameter `{n}`"),
    EvalErrorKind::Domain(m) => m.clone(),
})]
pub struct EvalError {
    pub position: usize,
    pub kind: EvalErrorKind,
}

/// Parses `src`, treating every non-reserved identifier as a parameter.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    Parser::new(src, None).parse()
}

/// Parses `src`, rejecting identifiers that are neither variables nor in `params`.
pub fn parse_with_params(src: &str, params: &[&str]) -> Result<Expr, ParseError> {
    Parser::new(src, Some(params)).parse()
}

/// Evaluates `e` at `(t, x)` with the given parameter bindings.
pub fn evaluate(e: &Expr, t: f64, x: &[f64; 3], params: &Params) -> Result<f64, EvalError> {
    e.eval(t, x, params)
}

impl Expr {
    pub fn eval(&self, t: f64, x: &[f64; 3], params: &Params) -> Result<f64, EvalError> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var(v) => Ok(match v {
                Var::T => t,
                Var::X1 => x[0],
                Var::X2 => x[1],
                Var::X3 => x[2],
            }),
            Expr::Param { name, pos } => params.get(name).copied().ok_or_else(|| EvalError {
                position: *pos,
                kind: EvalErrorKind::UnboundParameter(name.clone()),
            }),
            Expr::Unary { op, arg, pos } => {
                let a = arg.eval(t, x, params)?;
                let domain = |msg: String| EvalError {
                    position: *pos,
                    kind: EvalErrorKind::Domain(msg),
                };
                let v = match op {
                    UnaryOp::Neg => -a,
                    UnaryOp::Sin => a.sin(),
                    UnaryOp::Cos => a.cos(),
                    UnaryOp::Exp => a.exp(),
                    UnaryOp::Abs => a.abs(),
                    UnaryOp::Log if a <= 0.0 => {
                        return Err(domain(format!("log of non-positive value {a}")))
                    }
                    UnaryOp::Log => a.ln(),
                    UnaryOp::Sqrt if a < 0.0 => {
                        return Err(domain(format!("sqrt of negative value {a}")))
                    }
                    UnaryOp::Sqrt => a.sqrt(),
                };
                finite(v, *pos, op.name())
            }
            Expr::Binary { op, lhs, rhs, pos } => {
                let a = lhs.eval(t, x, params)?;
                let b = rhs.eval(t, x, params)?;
                let domain = |msg: String| EvalError {
                    position: *pos,
                    kind: EvalErrorKind::Domain(msg),
                };
                let v = match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div if b == 0.0 => {
                        return Err(domain("division by zero".to_string()))
                    }
                    BinaryOp::Div => a / b,
                    BinaryOp::Pow if a == 0.0 && b < 0.0 => {
                        return Err(domain(format!("0 raised to negative power {b}")))
                    }
                    BinaryOp::Pow if a < 0.0 && b.fract() != 0.0 => {
                        return Err(domain(format!("negative base {a} with non-integer exponent {b}")))
                    }
                    BinaryOp::Pow => a.powf(b),
                };
                finite(v, *pos, &op.symbol().to_string())
            }
        }
    }

    /// True when the expression depends on `t`.
    pub fn depends_on_time(&self) -> bool {
        match self {
            Expr::Var(Var::T) => true,
            Expr::Const(_) | Expr::Var(_) | Expr::Param { .. } => false,
            Expr::Unary { arg, .. } => arg.depends_on_time(),
            Expr::Binary { lhs, rhs, .. } => lhs.depends_on_time() || rhs.depends_on_time(),
        }
    }

    /// Parameter names referenced by the expression, sorted and deduplicated.
    pub fn param_names(&self) -> Vec<String> {
        fn walk(e: &Expr, out: &mut Vec<String>) {
            match e {
                Expr::Param { name, .. } => out.push(name.clone()),
                Expr::Unary { arg, .. } => walk(arg, out),
                Expr::Binary { lhs, rhs, .. } => {
                    walk(lhs, out);
                    walk(rhs, out);
                }
                Expr::Const(_) | Expr::Var(_) => {}
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }
}

fn finite(v: f64, position: usize, op: &str) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError {
            position,
            kind: EvalErrorKind::Domain(format!("`{op}` produced a non-finite value")),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number {n}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::End => "end of input".to_string(),
        }
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    tok: Tok,
    tok_pos: usize,
    params: Option<&'a [&'a str]>,
}

impl<'a> Parser<'a> {
    fn new(src: &str, params: Option<&'a [&'a str]>) -> Self {
        Parser {
            chars: src.chars().collect(),
            pos: 0,
            tok: Tok::End,
            tok_pos: 0,
            params,
        }
    }

    fn error(&self, position: usize, message: impl Into<String>, expected: &[&str]) -> ParseError {
        ParseError {
            position,
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn parse(mut self) -> Result<Expr, ParseError> {
        self.advance()?;
        if self.tok == Tok::End {
            return Err(self.error(self.tok_pos, "empty input", &["expression"]));
        }
        let e = self.expr()?;
        match self.tok {
            Tok::End => Ok(e),
            Tok::RParen => Err(self.error(self.tok_pos, "unbalanced `)`", &["operator", "end of input"])),
            ref t => Err(self.error(
                self.tok_pos,
                format!("trailing input: {}", t.describe()),
                &["operator", "end of input"],
            )),
        }
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
        self.tok_pos = self.pos;
        let Some(&c) = self.chars.get(self.pos) else {
            self.tok = Tok::End;
            return Ok(());
        };
        self.tok = if c.is_ascii_digit() || c == '.' {
            self.number()?
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = self.pos;
            while self.pos < self.chars.len()
                && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_')
            {
                self.pos += 1;
            }
            Tok::Ident(self.chars[start..self.pos].iter().collect())
        } else {
            self.pos += 1;
            match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(self.error(
                        self.tok_pos,
                        format!("unexpected character `{c}`"),
                        &["number", "identifier", "operator", "`(`", "`)`"],
                    ))
                }
            }
        };
        Ok(())
    }

    fn number(&mut self) -> Result<Tok, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.chars.len() && p.chars[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(self.error(start, "malformed number", &["digit"]));
        }
        if matches!(self.chars.get(self.pos), Some('e') | Some('E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.chars.get(self.pos), Some('+') | Some('-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                return Err(self.error(save, "malformed exponent", &["digit"]));
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Tok::Num(v)),
            _ => Err(self.error(start, format!("literal `{text}` out of range"), &["finite number"])),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = self.tok {
            let pos = self.tok_pos;
            self.advance()?;
            let rhs = self.term()?;
            let op = if c == '+' { BinaryOp::Add } else { BinaryOp::Sub };
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), pos };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = self.tok {
            let pos = self.tok_pos;
            self.advance()?;
            let rhs = self.unary()?;
            let op = if c == '*' { BinaryOp::Mul } else { BinaryOp::Div };
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), pos };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Op('-') {
            let pos = self.tok_pos;
            self.advance()?;
            let arg = self.unary()?;
            return Ok(Expr::Unary { op: UnaryOp::Neg, arg: Box::new(arg), pos });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.tok == Tok::Op('^') {
            let pos = self.tok_pos;
            self.advance()?;
            let exp = self.unary()?;
            return Ok(Expr::Binary { op: BinaryOp::Pow, lhs: Box::new(base), rhs: Box::new(exp), pos });
        }
        Ok(base)
    }

    fn expect_rparen(&mut self, open: usize) -> Result<(), ParseError> {
        if self.tok == Tok::RParen {
            self.advance()
        } else {
            Err(self.error(
                self.tok_pos,
                format!("unbalanced `(` opened at offset {open}"),
                &["`)`", "operator"],
            ))
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.tok_pos;
        match std::mem::replace(&mut self.tok, Tok::End) {
            Tok::Num(v) => {
                self.advance()?;
                Ok(Expr::Const(v))
            }
            Tok::LParen => {
                self.advance()?;
                let e = self.expr()?;
                self.expect_rparen(pos)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.advance()?;
                if let Some(op) = UnaryOp::function(&name) {
                    if self.tok != Tok::LParen {
                        return Err(self.error(self.tok_pos, format!("function `{name}` needs an argument"), &["`(`"]));
                    }
                    let open = self.tok_pos;
                    self.advance()?;
                    let arg = self.expr()?;
                    self.expect_rparen(open)?;
                    return Ok(Expr::Unary { op, arg: Box::new(arg), pos });
                }
                if self.tok == Tok::LParen {
                    return Err(self.error(
                        pos,
                        format!("unknown function `{name}`"),
                        &["sin", "cos", "exp", "log", "sqrt", "abs"],
                    ));
                }
                if let Some(v) = Var::from_name(&name) {
                    return Ok(Expr::Var(v));
                }
                if name == "pi" {
                    return Ok(Expr::Const(std::f64::consts::PI));
                }
                if let Some(known) = self.params {
                    if !known.contains(&name.as_str()) {
                        let mut expected = vec!["t", "x1", "x2", "x3", "pi"];
                        expected.extend_from_slice(known);
                        return Err(self.error(pos, format!("unknown identifier `{name}`"), &expected));
                    }
                }
                Ok(Expr::Param { name, pos })
            }
            other => {
                self.tok = other;
                let msg = match &self.tok {
                    Tok::End => "unexpected end of input".to_string(),
                    t => format!("unexpected {}", t.describe()),
                };
                Err(self.error(pos, msg, &["expression"]))
            }
        }
    }
}
